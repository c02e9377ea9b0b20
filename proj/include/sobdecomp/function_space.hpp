#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "sobdecomp/geometry.hpp"

namespace sobdecomp {

/// 1-d mesh aligned with an OpenSetG: every endpoint of every G interval and
/// of the window is a node, so no cell straddles the boundary of G. Each
/// G interval and each F component is split into max(4, ceil(len/h_max))
/// equal cells; cell widths never exceed h_max.
class Mesh {
 public:
  static std::shared_ptr<const Mesh> build(const OpenSetG& g, double h_max);

  const OpenSetG& geometry() const { return g_; }
  const Interval& window() const { return g_.window(); }
  const std::vector<double>& nodes() const { return nodes_; }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  int n_cells() const { return n_nodes() - 1; }
  bool cell_in_g(int cell) const { return g_cell_[static_cast<size_t>(cell)]; }
  double cell_width(int cell) const {
    return nodes_[static_cast<size_t>(cell) + 1] -
           nodes_[static_cast<size_t>(cell)];
  }

  /// Index of the F component containing a node, or -1 for nodes interior
  /// to G (endpoints of F components count as F nodes).
  int f_component_of_node(int node) const {
    return f_comp_of_node_[static_cast<size_t>(node)];
  }
  int n_f_nodes() const { return n_f_nodes_; }
  int n_f_components() const { return n_f_components_; }

  double max_cell_width() const { return max_cell_width_; }
  double h_max_requested() const { return h_max_requested_; }

  bool same_as(const Mesh& other) const;

 private:
  Mesh(OpenSetG g, double h_max);

  OpenSetG g_;
  double h_max_requested_;
  std::vector<double> nodes_;
  std::vector<char> g_cell_;
  std::vector<int> f_comp_of_node_;
  int n_f_nodes_ = 0;
  int n_f_components_ = 0;
  double max_cell_width_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Continuous piecewise-linear function on a mesh, stored by nodal values.
/// Immutable value object; the derivative is cellwise constant.
class GridFunction {
 public:
  GridFunction(MeshPtr mesh, std::vector<double> values);

  static GridFunction zero(MeshPtr mesh);
  static GridFunction interpolate(MeshPtr mesh,
                                  const std::function<double(double)>& f);
  /// Samples a scale function; exact because the mesh contains every
  /// breakpoint of s.
  static GridFunction from_scale(MeshPtr mesh, const ScaleFunction& s);

  const MeshPtr& mesh() const { return mesh_; }
  const std::vector<double>& values() const { return values_; }
  double value(int node) const { return values_[static_cast<size_t>(node)]; }

  double slope(int cell) const {
    return (values_[static_cast<size_t>(cell) + 1] -
            values_[static_cast<size_t>(cell)]) /
           mesh_->cell_width(cell);
  }
  /// Piecewise-linear evaluation; throws std::domain_error outside window.
  double operator()(double x) const;

  double max_abs() const;
  double max_abs_slope() const;

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  GridFunction scaled(double a) const;
  GridFunction shifted(double c) const;

 private:
  MeshPtr mesh_;
  std::vector<double> values_;
};

struct FormParams {
  double alpha = 0.0;
};

/// L² inner product of the two interpolants; exact for the cellwise cubic
/// integrand (Simpson on each cell).
double inner_L2(const GridFunction& u, const GridFunction& v);

/// D(u, v) = ∫ u'v' dx, exact cellwise sum.
double dirichlet_D(const GridFunction& u, const GridFunction& v);

/// E_α(u, v) = ½ D(u, v) + α (u, v).
double inner_e_alpha(const GridFunction& u, const GridFunction& v,
                     const FormParams& p);

struct MembershipResult {
  bool member = false;
  double max_f_slope = 0.0;  // worst |u'| over F cells
  double tol = 0.0;
};

/// Scale-invariant default tolerance for the F-slope membership test,
/// far below discretization error.
double default_membership_tol(const GridFunction& u);

/// Tests u' = 0 on F cellwise: member iff every F-cell slope magnitude
/// is <= tol. Pass tol < 0 to use the default.
MembershipResult membership_F_s(const GridFunction& u, double tol = -1.0);

/// The subspace form ½ ∫_G u'v' dx (equal to ds-integration on G, where
/// ds = dx). Both arguments must pass membership_F_s; throws
/// std::domain_error("not in F^(s)") otherwise.
double form_subspace(const GridFunction& u, const GridFunction& v);

/// sqrt(E_1(u, u)); the natural scale for tolerance formulas.
double e1_norm(const GridFunction& u);

/// CSV export: header "x,value", one row per node, 17 significant digits.
void write_csv(const GridFunction& u, std::ostream& out);

}  // namespace sobdecomp
