#include "sobdecomp/projection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

namespace sobdecomp {

namespace {

constexpr double kDenomGuard = 1e-30;
constexpr int kDirectDofLimit = 10000;

struct ElementMatrix {
  // Symmetric 2x2: stiffness/2 + alpha * mass, exact for P1 elements.
  double a00, a01, a11;
};

ElementMatrix element_e_alpha(double width, double alpha) {
  const double k = 0.5 / width;
  const double m = alpha * width / 6.0;
  return {k + 2.0 * m, -k + m, k + 2.0 * m};
}

// Linear system for min_v E_alpha(f - v) over the DofMap's affine set:
// A_ff c = b_f(f) - A_fc w for free DOFs c, fixed values w.
class ConstrainedGalerkin {
 public:
  ConstrainedGalerkin(const Mesh& mesh, const DofMap& map, double alpha,
                      SolverKind solver)
      : mesh_(mesh), map_(map), alpha_(alpha) {
    free_index_.assign(static_cast<size_t>(map.n_dofs), -1);
    for (int d = 0; d < map.n_dofs; ++d) {
      if (!map.fixed[static_cast<size_t>(d)]) {
        free_index_[static_cast<size_t>(d)] = n_free_++;
      }
    }
    assemble();
    const bool direct = solver == SolverKind::Direct ||
                        (solver == SolverKind::Auto && n_free_ <= kDirectDofLimit);
    use_direct_ = direct;
    if (n_free_ == 0) return;
    if (direct) {
      ldlt_.compute(a_ff_);
      if (ldlt_.info() != Eigen::Success) {
        throw std::runtime_error("direct factorization failed (singular system)");
      }
    } else {
      cg_.setTolerance(1e-12);
      cg_.setMaxIterations(20L * n_free_);
      cg_.compute(a_ff_);
    }
  }

  // fixed_values: per-DOF pinned values (only entries at fixed DOFs used).
  // f may be null (target zero).
  std::vector<double> solve(const std::vector<double>& fixed_values,
                            const GridFunction* f) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free_);
    if (f != nullptr) accumulate_rhs(*f, rhs);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(map_.n_dofs);
    for (int d = 0; d < map_.n_dofs; ++d) {
      if (map_.fixed[static_cast<size_t>(d)]) {
        w[d] = fixed_values[static_cast<size_t>(d)];
      }
    }
    if (a_fc_.cols() > 0) rhs -= a_fc_ * w;

    Eigen::VectorXd c(n_free_);
    if (n_free_ > 0) {
      if (use_direct_) {
        c = ldlt_.solve(rhs);
      } else {
        c = cg_.solve(rhs);
        if (cg_.info() != Eigen::Success) {
          std::ostringstream msg;
          msg << "conjugate gradient did not converge: iterations="
              << cg_.iterations() << " residual=" << cg_.error();
          throw std::runtime_error(msg.str());
        }
      }
    }

    std::vector<double> dof_values(static_cast<size_t>(map_.n_dofs), 0.0);
    for (int d = 0; d < map_.n_dofs; ++d) {
      dof_values[static_cast<size_t>(d)] =
          map_.fixed[static_cast<size_t>(d)]
              ? fixed_values[static_cast<size_t>(d)]
              : c[free_index_[static_cast<size_t>(d)]];
    }
    return dof_values;
  }

 private:
  void assemble() {
    std::vector<Eigen::Triplet<double>> ff;
    std::vector<Eigen::Triplet<double>> fc;
    ff.reserve(static_cast<size_t>(mesh_.n_cells()) * 4);
    for (int cell = 0; cell < mesh_.n_cells(); ++cell) {
      const ElementMatrix e = element_e_alpha(mesh_.cell_width(cell), alpha_);
      const int d0 = map_.node_to_dof[static_cast<size_t>(cell)];
      const int d1 = map_.node_to_dof[static_cast<size_t>(cell) + 1];
      const double vals[2][2] = {{e.a00, e.a01}, {e.a01, e.a11}};
      const int dofs[2] = {d0, d1};
      for (int i = 0; i < 2; ++i) {
        const int fi = free_index_[static_cast<size_t>(dofs[i])];
        if (fi < 0) continue;
        for (int j = 0; j < 2; ++j) {
          const int fj = free_index_[static_cast<size_t>(dofs[j])];
          if (fj >= 0) {
            ff.emplace_back(fi, fj, vals[i][j]);
          } else {
            fc.emplace_back(fi, dofs[j], vals[i][j]);
          }
        }
      }
    }
    a_ff_.resize(n_free_, n_free_);
    a_ff_.setFromTriplets(ff.begin(), ff.end());
    a_fc_.resize(n_free_, map_.n_dofs);
    a_fc_.setFromTriplets(fc.begin(), fc.end());
  }

  // rhs_i += E_alpha(f, phi_i) for free DOFs, assembled cellwise.
  void accumulate_rhs(const GridFunction& f, Eigen::VectorXd& rhs) const {
    const auto& fv = f.values();
    for (int cell = 0; cell < mesh_.n_cells(); ++cell) {
      const ElementMatrix e = element_e_alpha(mesh_.cell_width(cell), alpha_);
      const size_t n0 = static_cast<size_t>(cell);
      const double r0 = e.a00 * fv[n0] + e.a01 * fv[n0 + 1];
      const double r1 = e.a01 * fv[n0] + e.a11 * fv[n0 + 1];
      const int f0 = free_index_[static_cast<size_t>(map_.node_to_dof[n0])];
      const int f1 = free_index_[static_cast<size_t>(map_.node_to_dof[n0 + 1])];
      if (f0 >= 0) rhs[f0] += r0;
      if (f1 >= 0) rhs[f1] += r1;
    }
  }

  const Mesh& mesh_;
  const DofMap& map_;
  double alpha_;
  int n_free_ = 0;
  bool use_direct_ = true;
  std::vector<int> free_index_;
  Eigen::SparseMatrix<double> a_ff_;
  Eigen::SparseMatrix<double> a_fc_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg_;
};

// r_d = E_alpha(g, phi_d) and diag_d = E_alpha(phi_d, phi_d) over all DOFs
// of the map, assembled independently of any solve.
void dof_residuals(const Mesh& mesh, const DofMap& map, double alpha,
                   const GridFunction& g, std::vector<double>& r,
                   std::vector<double>& diag) {
  r.assign(static_cast<size_t>(map.n_dofs), 0.0);
  diag.assign(static_cast<size_t>(map.n_dofs), 0.0);
  const auto& gv = g.values();
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const ElementMatrix e = element_e_alpha(mesh.cell_width(cell), alpha);
    const size_t n0 = static_cast<size_t>(cell);
    const int d0 = map.node_to_dof[n0];
    const int d1 = map.node_to_dof[n0 + 1];
    r[static_cast<size_t>(d0)] += e.a00 * gv[n0] + e.a01 * gv[n0 + 1];
    r[static_cast<size_t>(d1)] += e.a01 * gv[n0] + e.a11 * gv[n0 + 1];
    diag[static_cast<size_t>(d0)] += e.a00;
    diag[static_cast<size_t>(d1)] += e.a11;
    if (d0 == d1) {
      // Both cell nodes merged into one DOF: cross terms land on the diagonal.
      diag[static_cast<size_t>(d0)] += 2.0 * e.a01;
    }
  }
}

double normalized_orth_residual(const Mesh& mesh, const DofMap& map,
                                double alpha, const GridFunction& f2,
                                bool free_dofs_only) {
  std::vector<double> r, diag;
  dof_residuals(mesh, map, alpha, f2, r, diag);
  const double norm_f2 = std::sqrt(
      std::max(0.0, inner_e_alpha(f2, f2, FormParams{alpha})));
  double worst = 0.0;
  for (int d = 0; d < map.n_dofs; ++d) {
    if (free_dofs_only && map.fixed[static_cast<size_t>(d)]) continue;
    const double basis_norm = std::sqrt(std::max(0.0, diag[static_cast<size_t>(d)]));
    worst = std::max(worst, std::abs(r[static_cast<size_t>(d)]) /
                                (norm_f2 * basis_norm + kDenomGuard));
  }
  return worst;
}

DecompResult finish_decomposition(const GridFunction& f, GridFunction f1,
                                  const Mesh& mesh, const DofMap& map,
                                  double alpha, bool free_dofs_only) {
  GridFunction f2 = f - f1;
  const FormParams p{alpha};
  DecompResult out{std::move(f1), std::move(f2), 0.0, 0.0, 0.0, 0.0, 0.0};
  out.e_alpha_f = inner_e_alpha(f, f, p);
  out.e_alpha_f1 = inner_e_alpha(out.f1, out.f1, p);
  out.e_alpha_f2 = inner_e_alpha(out.f2, out.f2, p);
  out.pythagoras_gap = std::abs(out.e_alpha_f - out.e_alpha_f1 - out.e_alpha_f2) /
                       (std::abs(out.e_alpha_f) + kDenomGuard);
  out.orth_residual =
      normalized_orth_residual(mesh, map, alpha, out.f2, free_dofs_only);
  return out;
}

}  // namespace

DofMap DofMap::full(const Mesh& mesh) {
  DofMap map;
  map.n_dofs = mesh.n_nodes();
  map.node_to_dof.resize(static_cast<size_t>(mesh.n_nodes()));
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    map.node_to_dof[static_cast<size_t>(n)] = n;
  }
  map.fixed.assign(static_cast<size_t>(map.n_dofs), 0);
  map.fixed_value.assign(static_cast<size_t>(map.n_dofs), 0.0);
  return map;
}

DofMap DofMap::subspace_f_s(const Mesh& mesh) {
  DofMap map;
  map.node_to_dof.assign(static_cast<size_t>(mesh.n_nodes()), -1);
  map.f_component_dof.assign(static_cast<size_t>(mesh.n_f_components()), -1);
  int next = 0;
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    const int comp = mesh.f_component_of_node(n);
    if (comp < 0) {
      map.node_to_dof[static_cast<size_t>(n)] = next++;
    } else if (map.f_component_dof[static_cast<size_t>(comp)] < 0) {
      map.f_component_dof[static_cast<size_t>(comp)] = next;
      map.node_to_dof[static_cast<size_t>(n)] = next++;
    } else {
      map.node_to_dof[static_cast<size_t>(n)] =
          map.f_component_dof[static_cast<size_t>(comp)];
    }
  }
  map.n_dofs = next;
  map.fixed.assign(static_cast<size_t>(map.n_dofs), 0);
  map.fixed_value.assign(static_cast<size_t>(map.n_dofs), 0.0);
  return map;
}

DofMap DofMap::part_space(const Mesh& mesh) {
  DofMap map = subspace_f_s(mesh);
  for (int dof : map.f_component_dof) {
    map.fixed[static_cast<size_t>(dof)] = 1;
    map.fixed_value[static_cast<size_t>(dof)] = 0.0;
  }
  return map;
}

DofMap DofMap::with_fixed_f_components(const std::vector<double>& values) const {
  if (values.size() != f_component_dof.size()) {
    throw std::invalid_argument("one value per F component required");
  }
  DofMap map = *this;
  for (size_t j = 0; j < values.size(); ++j) {
    const size_t dof = static_cast<size_t>(f_component_dof[j]);
    map.fixed[dof] = 1;
    map.fixed_value[dof] = values[j];
  }
  return map;
}

DofMap DofMap::with_fixed_node(int node, double value) const {
  DofMap map = *this;
  const size_t dof = static_cast<size_t>(node_to_dof[static_cast<size_t>(node)]);
  map.fixed[dof] = 1;
  map.fixed_value[dof] = value;
  return map;
}

int DofMap::n_free() const {
  int n = 0;
  for (char fl : fixed) n += fl ? 0 : 1;
  return n;
}

std::vector<double> DofMap::expand(const std::vector<double>& dof_values) const {
  std::vector<double> nodal(node_to_dof.size());
  for (size_t n = 0; n < node_to_dof.size(); ++n) {
    nodal[n] = dof_values[static_cast<size_t>(node_to_dof[n])];
  }
  return nodal;
}

GridFunction project_onto(const GridFunction& f, const DofMap& map,
                          const FormParams& p, SolverKind solver) {
  const Mesh& mesh = *f.mesh();
  ConstrainedGalerkin system(mesh, map, p.alpha, solver);
  std::vector<double> dof_values = system.solve(map.fixed_value, &f);
  return GridFunction(f.mesh(), map.expand(dof_values));
}

double subspace_orth_residual(const GridFunction& u, const FormParams& p) {
  const Mesh& mesh = *u.mesh();
  const DofMap map = DofMap::subspace_f_s(mesh);
  return normalized_orth_residual(mesh, map, p.alpha, u,
                                  /*free_dofs_only=*/false);
}

DecompResult decompose_F_s(const GridFunction& f, const FormParams& p,
                           SolverKind solver) {
  const Mesh& mesh = *f.mesh();
  if (p.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  DofMap map = DofMap::subspace_f_s(mesh);
  if (p.alpha == 0.0) {
    // The energy form is blind to constants; gauge by pinning the left
    // window value of the subspace part.
    map = map.with_fixed_node(0, f.value(0));
  }
  GridFunction f1 = project_onto(f, map, p, solver);
  return finish_decomposition(f, std::move(f1), mesh, map, p.alpha,
                              /*free_dofs_only=*/false);
}

DecompResult decompose_part(const GridFunction& f, const FormParams& p,
                            PartKind which, SolverKind solver) {
  if (!(p.alpha > 0.0)) {
    throw std::invalid_argument("decompose_part requires alpha > 0");
  }
  if (which == PartKind::Subspace && !membership_F_s(f).member) {
    throw std::domain_error("not in F^(s)");
  }
  const Mesh& mesh = *f.mesh();
  const DofMap map = DofMap::part_space(mesh);
  GridFunction f1 = project_onto(f, map, p, solver);
  return finish_decomposition(f, std::move(f1), mesh, map, p.alpha,
                              /*free_dofs_only=*/true);
}

SubspaceBasis basis_H_s_F(const MeshPtr& mesh, const FormParams& p,
                          SolverKind solver) {
  if (!(p.alpha > 0.0)) {
    throw std::invalid_argument("basis_H_s_F requires alpha > 0");
  }
  const int n_comp = mesh->n_f_components();
  SubspaceBasis basis;
  if (n_comp == 0) return basis;

  const DofMap pattern =
      DofMap::subspace_f_s(*mesh).with_fixed_f_components(
          std::vector<double>(static_cast<size_t>(n_comp), 0.0));
  // One factorization serves every indicator extension.
  ConstrainedGalerkin system(*mesh, pattern, p.alpha, solver);
  std::vector<double> fixed(pattern.fixed_value.size(), 0.0);
  for (int j = 0; j < n_comp; ++j) {
    std::fill(fixed.begin(), fixed.end(), 0.0);
    fixed[static_cast<size_t>(pattern.f_component_dof[static_cast<size_t>(j)])] =
        1.0;
    std::vector<double> dof_values = system.solve(fixed, nullptr);
    basis.emplace_back(mesh, pattern.expand(dof_values));
  }
  return basis;
}

ThreeWayReport verify_three_way(const GridFunction& f, const FormParams& p,
                                SolverKind solver) {
  if (!(p.alpha > 0.0)) {
    throw std::invalid_argument("verify_three_way requires alpha > 0");
  }
  const MeshPtr mesh = f.mesh();
  const GridFunction h_f = decompose_part(f, p, PartKind::Full, solver).f2;
  const GridFunction pg_f = decompose_F_s(f, p, solver).f2;

  // Independent route for the H^(s)_F part: small dense Gram system on the
  // explicit basis.
  const SubspaceBasis basis = basis_H_s_F(mesh, p, solver);
  const int dim = static_cast<int>(basis.size());
  GridFunction hs_f = GridFunction::zero(mesh);
  if (dim > 0) {
    Eigen::MatrixXd gram(dim, dim);
    Eigen::VectorXd rhs(dim);
    for (int i = 0; i < dim; ++i) {
      rhs[i] = inner_e_alpha(f, basis[static_cast<size_t>(i)], p);
      for (int j = i; j < dim; ++j) {
        gram(i, j) = gram(j, i) =
            inner_e_alpha(basis[static_cast<size_t>(i)],
                          basis[static_cast<size_t>(j)], p);
      }
    }
    const Eigen::VectorXd coeff = gram.ldlt().solve(rhs);
    std::vector<double> vals(static_cast<size_t>(mesh->n_nodes()), 0.0);
    for (int j = 0; j < dim; ++j) {
      const auto& bv = basis[static_cast<size_t>(j)].values();
      for (size_t n = 0; n < vals.size(); ++n) vals[n] += coeff[j] * bv[n];
    }
    hs_f = GridFunction(mesh, std::move(vals));
  }

  ThreeWayReport rep{f - h_f, hs_f, pg_f, 0, 0, 0, 0, 0, 0, 0, 0, false};
  const GridFunction gap = h_f - (hs_f + pg_f);
  const double f_norm = std::sqrt(std::max(0.0, inner_e_alpha(f, f, p)));
  rep.gap_e_alpha = std::sqrt(std::max(0.0, inner_e_alpha(gap, gap, p))) /
                    (f_norm + kDenomGuard);
  rep.gap_max_node = gap.max_abs();

  auto orth = [&](const GridFunction& a, const GridFunction& b) {
    const double na = std::sqrt(std::max(0.0, inner_e_alpha(a, a, p)));
    const double nb = std::sqrt(std::max(0.0, inner_e_alpha(b, b, p)));
    return std::abs(inner_e_alpha(a, b, p)) / (na * nb + kDenomGuard);
  };
  rep.orth_fg_hs = orth(rep.part_f_g, rep.part_h_s);
  rep.orth_fg_ga = orth(rep.part_f_g, rep.part_g_a);
  rep.orth_hs_ga = orth(rep.part_h_s, rep.part_g_a);

  rep.n_f_nodes = mesh->n_f_nodes();
  rep.n_f_components = mesh->n_f_components();
  rep.dim_g_alpha = mesh->n_nodes() - DofMap::subspace_f_s(*mesh).n_dofs;
  rep.dim_identity = rep.n_f_nodes == rep.n_f_components + rep.dim_g_alpha;
  return rep;
}

}  // namespace sobdecomp
