#pragma once

#include <string>
#include <utility>

#include "sobdecomp/projection.hpp"

namespace sobdecomp {

/// Closed-form solution of ½u'' = αu on one interval:
/// u(x) = c_cosh·cosh(κ(x−center)) + c_sinh·sinh(κ(x−center)), κ = sqrt(2α).
/// For α = 0 this degenerates to the affine u(x) = c_cosh + c_sinh·(x−center).
struct IntervalSolution {
  Interval interval;
  double c_cosh = 0.0;
  double c_sinh = 0.0;
  double center = 0.0;
  double alpha = 0.0;
  bool ill_conditioned = false;  // set when κ·length > 50

  double kappa() const;
  double eval(double x) const;
  double eval_slope(double x) const;
};

/// Unique interval solution with u'(lo) = left_slope, u'(hi) = right_slope.
/// Requires α > 0 (the 2x2 system is then never singular); solved through
/// coth/1-over-sinh so large κ·length stays finite.
IntervalSolution closed_form_on_interval(const Interval& interval,
                                         const FormParams& p,
                                         double left_slope,
                                         double right_slope);

struct MembershipGAlphaResult {
  bool member = false;
  double worst_residual = 0.0;
  double tol = 0.0;
};

/// Membership test for G^(s)_alpha,h: within every G component, adjacent
/// cell slopes must satisfy u'(x) − u'(y) = 2α∫_y^x u(z)dz, checked with
/// midpoint slopes and the exact piecewise-linear integral. Pass tol < 0
/// for the default 10·h²·(1 + ||u||_{E_1}).
MembershipGAlphaResult membership_G_alpha(const GridFunction& u,
                                          const FormParams& p,
                                          double tol = -1.0);

struct OdeResidual {
  double value = 0.0;          // max over components of relative L² misfit
  int skipped_components = 0;  // components with < 3 nodes
};

/// Distance of u from the solution span of ½u'' = αu per G component:
/// least-squares fit of the nodal values by span{cosh, sinh} (affine span
/// when α = 0), max over components of the relative misfit.
OdeResidual ode_residual(const GridFunction& u, const FormParams& p);

/// max over F cells of |u' − f'|.
double neumann_residual(const GridFunction& u, const GridFunction& f);

/// Slope statistics over G cells; the spread vanishes for members of the
/// zero-alpha complement.
struct GSlopeStats {
  double min_slope = 0.0;
  double max_slope = 0.0;
  double spread = 0.0;
};
GSlopeStats g_slope_stats(const GridFunction& u);

enum class ConstantsAllowed { None, C0, C0AndC1s };
std::string to_string(ConstantsAllowed c);

/// A complete solution family: particular + span(homogeneous_basis), plus
/// the free constants the zero-alpha branch admits.
struct SolutionFamily {
  GridFunction particular;
  SubspaceBasis homogeneous_basis;
  ConstantsAllowed constants_allowed = ConstantsAllowed::None;
  double ode_res = 0.0;
  double neumann_res = 0.0;
  int skipped_ode_components = 0;
  std::string branch_note;

  int family_dim() const { return static_cast<int>(homogeneous_basis.size()); }
};

/// All solutions of ½u'' = αu on G with u' = f' on F (α > 0):
/// particular = the G^(s)_alpha part of f, homogeneous basis = basis_H_s_F.
/// Verifies the ODE and Neumann residuals of the particular solution and of
/// a few fixed-seed basis combinations; throws with a residual report if
/// they exceed tolerance.
SolutionFamily solve_neumann(const GridFunction& f, const FormParams& p,
                             SolverKind solver = SolverKind::Auto);

/// The α = 0 decomposition: minimizes the energy form over F^(s)_h with the
/// left window value of f1 pinned to f's (the decomposition is otherwise
/// unique only up to a constant). Equivalent to decompose_F_s at α = 0.
DecompResult decompose_zero_alpha(const GridFunction& f,
                                  SolverKind solver = SolverKind::Auto);

/// All solutions of u'' = 0 on G with u' = f' on F. The homogeneous basis
/// spans the zero-alpha harmonic extensions modulo constants; whether C1·s
/// is admitted is decided by the flank metadata (a finite window cannot
/// distinguish the two branches of the real-line statement).
SolutionFamily solve_zero_alpha(const GridFunction& f,
                                std::pair<bool, bool> flank_unbounded,
                                SolverKind solver = SolverKind::Auto);

}  // namespace sobdecomp
