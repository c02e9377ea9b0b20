#pragma once

#include <vector>

#include "sobdecomp/function_space.hpp"

namespace sobdecomp {

/// Direct factorization below 10^4 free DOFs, conjugate gradient with
/// relative residual 1e-12 above. Both paths satisfy the same contracts.
enum class SolverKind { Auto, Direct, ConjugateGradient };

/// Node -> degree-of-freedom map. The constraint u' = 0 a.e. on F is
/// imposed exactly by merging all nodes of one F component into a single
/// DOF; part spaces additionally pin DOFs to prescribed values.
struct DofMap {
  std::vector<int> node_to_dof;
  int n_dofs = 0;
  std::vector<int> f_component_dof;  // merged DOF per F component
  std::vector<char> fixed;           // per DOF
  std::vector<double> fixed_value;   // per DOF, meaningful where fixed

  /// One DOF per node (the full space F_h).
  static DofMap full(const Mesh& mesh);
  /// Merged per F component (the subspace F^(s)_h);
  /// n_dofs = n_nodes - n_f_nodes + n_f_components.
  static DofMap subspace_f_s(const Mesh& mesh);
  /// All F-component DOFs pinned to 0 (the part space F_G,h, which
  /// coincides with F^(s)_G,h).
  static DofMap part_space(const Mesh& mesh);

  /// Copy with the merged F-component DOFs pinned to the given values.
  DofMap with_fixed_f_components(const std::vector<double>& values) const;
  /// Copy with the DOF containing `node` pinned (gauge for alpha = 0).
  DofMap with_fixed_node(int node, double value) const;

  int n_free() const;
  std::vector<double> expand(const std::vector<double>& dof_values) const;
};

/// f = f1 + f2 nodewise exact; f1 in the chosen subspace, f2 the
/// complement part. Residual diagnostics are normalized and relative.
struct DecompResult {
  GridFunction f1;
  GridFunction f2;
  double orth_residual = 0.0;
  double pythagoras_gap = 0.0;
  double e_alpha_f = 0.0;
  double e_alpha_f1 = 0.0;
  double e_alpha_f2 = 0.0;
};

/// Splits f along F_h = F^(s)_h ⊕ G^(s)_alpha,h: f1 is the E_alpha-best
/// approximation of f in F^(s)_h, f2 = f - f1 the orthogonal-complement
/// part. With alpha = 0 the energy form alone is minimized and the
/// decomposition is gauged by pinning f1 at the left window edge.
DecompResult decompose_F_s(const GridFunction& f, const FormParams& p,
                           SolverKind solver = SolverKind::Auto);

enum class PartKind { Full, Subspace };

/// Splits f along F_h = F_G,h ⊕ H_F,h (Full) or
/// F^(s)_h = F^(s)_G,h ⊕ H^(s)_F,h (Subspace; f must satisfy u' = 0 on F).
/// f1 vanishes at every F node; f2 agrees with f on F and is the
/// E_alpha-minimal extension into G. Requires alpha > 0.
DecompResult decompose_part(const GridFunction& f, const FormParams& p,
                            PartKind which,
                            SolverKind solver = SolverKind::Auto);

using SubspaceBasis = std::vector<GridFunction>;

/// One element per F component: the E_alpha-minimal member of F^(s)_h
/// taking value 1 on that component and 0 on the others. Requires
/// alpha > 0; empty when F is empty.
SubspaceBasis basis_H_s_F(const MeshPtr& mesh, const FormParams& p,
                          SolverKind solver = SolverKind::Auto);

struct ThreeWayReport {
  GridFunction part_f_g;   // component in F_G,h
  GridFunction part_h_s;   // component in H^(s)_F,h
  GridFunction part_g_a;   // component in G^(s)_alpha,h
  double gap_e_alpha = 0.0;     // ||H f - (H^(s) f + P f)||_Ea / ||f||_Ea
  double gap_max_node = 0.0;
  double orth_fg_hs = 0.0;      // normalized pairwise E_alpha products
  double orth_fg_ga = 0.0;
  double orth_hs_ga = 0.0;
  int n_f_nodes = 0;
  int n_f_components = 0;
  int dim_g_alpha = 0;          // n_nodes - dim F^(s)_h
  bool dim_identity = false;    // n_f_nodes == n_f_components + dim_g_alpha
};

/// Computes the H_F,h part, the H^(s)_F,h part (by an independent small
/// Gram solve on basis_H_s_F) and the G^(s)_alpha,h part of f, and checks
/// that the first equals the sum of the other two. Requires alpha > 0.
ThreeWayReport verify_three_way(const GridFunction& f, const FormParams& p,
                                SolverKind solver = SolverKind::Auto);

/// E_alpha-projection of f onto the affine set described by the DofMap
/// (free DOFs optimized, fixed DOFs pinned). Building block for the
/// operations above, exposed for diagnostics.
GridFunction project_onto(const GridFunction& f, const DofMap& map,
                          const FormParams& p,
                          SolverKind solver = SolverKind::Auto);

/// max over the F^(s)_h basis of |E_alpha(u, phi)| / (||u|| ||phi|| + eps):
/// the orthogonality route for testing membership in G^(s)_alpha,h,
/// independent of the slope-identity route in the harmonic module.
double subspace_orth_residual(const GridFunction& u, const FormParams& p);

}  // namespace sobdecomp
