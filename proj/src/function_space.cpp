#include "sobdecomp/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace sobdecomp {

namespace {

void require_same_mesh(const GridFunction& u, const GridFunction& v) {
  if (u.mesh() == v.mesh()) return;
  if (u.mesh() && v.mesh() && u.mesh()->same_as(*v.mesh())) return;
  throw std::invalid_argument("mesh mismatch");
}

struct Segment {
  Interval span;
  bool in_g;
};

}  // namespace

Mesh::Mesh(OpenSetG g, double h_max) : g_(std::move(g)), h_max_requested_(h_max) {
  if (!(h_max > 0.0)) throw std::invalid_argument("h_max must be positive");

  // The window partitions into alternating G intervals and F components.
  std::vector<Segment> segments;
  for (const Interval& iv : g_.intervals()) segments.push_back({iv, true});
  for (const Interval& iv : g_.f_components()) segments.push_back({iv, false});
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) {
              return a.span.lo < b.span.lo;
            });

  nodes_.push_back(g_.window().lo);
  int f_index = 0;
  std::vector<std::pair<int, int>> f_node_ranges;  // [first,last] per F comp
  for (const Segment& seg : segments) {
    const double len = seg.span.length();
    int k = std::max(4, static_cast<int>(std::ceil(len / h_max)));
    const int first_node = static_cast<int>(nodes_.size()) - 1;
    for (int i = 1; i <= k; ++i) {
      nodes_.push_back(i == k ? seg.span.hi : seg.span.lo + i * len / k);
      g_cell_.push_back(seg.in_g ? 1 : 0);
    }
    if (!seg.in_g) {
      f_node_ranges.emplace_back(first_node, static_cast<int>(nodes_.size()) - 1);
      ++f_index;
    }
  }

  f_comp_of_node_.assign(nodes_.size(), -1);
  for (int j = 0; j < static_cast<int>(f_node_ranges.size()); ++j) {
    for (int n = f_node_ranges[j].first; n <= f_node_ranges[j].second; ++n) {
      f_comp_of_node_[static_cast<size_t>(n)] = j;
    }
  }
  n_f_components_ = f_index;
  n_f_nodes_ = static_cast<int>(
      std::count_if(f_comp_of_node_.begin(), f_comp_of_node_.end(),
                    [](int c) { return c >= 0; }));
  for (int c = 0; c < n_cells(); ++c) {
    max_cell_width_ = std::max(max_cell_width_, cell_width(c));
  }
}

std::shared_ptr<const Mesh> Mesh::build(const OpenSetG& g, double h_max) {
  return std::shared_ptr<const Mesh>(new Mesh(g, h_max));
}

bool Mesh::same_as(const Mesh& other) const {
  return this == &other || nodes_ == other.nodes_;
}

GridFunction::GridFunction(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_) throw std::invalid_argument("null mesh");
  if (static_cast<int>(values_.size()) != mesh_->n_nodes()) {
    throw std::invalid_argument("value count does not match mesh nodes");
  }
}

GridFunction GridFunction::zero(MeshPtr mesh) {
  std::vector<double> v(static_cast<size_t>(mesh->n_nodes()), 0.0);
  return GridFunction(std::move(mesh), std::move(v));
}

GridFunction GridFunction::interpolate(
    MeshPtr mesh, const std::function<double(double)>& f) {
  std::vector<double> v;
  v.reserve(static_cast<size_t>(mesh->n_nodes()));
  for (double x : mesh->nodes()) v.push_back(f(x));
  return GridFunction(std::move(mesh), std::move(v));
}

GridFunction GridFunction::from_scale(MeshPtr mesh, const ScaleFunction& s) {
  return interpolate(std::move(mesh), [&s](double x) { return s(x); });
}

double GridFunction::operator()(double x) const {
  const auto& xs = mesh_->nodes();
  if (x < xs.front() || x > xs.back()) {
    throw std::domain_error("x outside window");
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return values_.back();
  if (it == xs.begin()) return values_.front();
  const size_t hi = static_cast<size_t>(it - xs.begin());
  const size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::max_abs_slope() const {
  double m = 0.0;
  for (int c = 0; c < mesh_->n_cells(); ++c) m = std::max(m, std::abs(slope(c)));
  return m;
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  require_same_mesh(*this, o);
  std::vector<double> v(values_);
  for (size_t i = 0; i < v.size(); ++i) v[i] += o.values_[i];
  return GridFunction(mesh_, std::move(v));
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  require_same_mesh(*this, o);
  std::vector<double> v(values_);
  for (size_t i = 0; i < v.size(); ++i) v[i] -= o.values_[i];
  return GridFunction(mesh_, std::move(v));
}

GridFunction GridFunction::scaled(double a) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= a;
  return GridFunction(mesh_, std::move(v));
}

GridFunction GridFunction::shifted(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x += c;
  return GridFunction(mesh_, std::move(v));
}

double inner_L2(const GridFunction& u, const GridFunction& v) {
  require_same_mesh(u, v);
  const Mesh& m = *u.mesh();
  const auto& uv = u.values();
  const auto& vv = v.values();
  double acc = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) {
    const size_t i = static_cast<size_t>(c);
    const double w = m.cell_width(c);
    // Exact for the product of two linear functions on the cell.
    acc += w / 6.0 *
           (2.0 * uv[i] * vv[i] + uv[i] * vv[i + 1] + uv[i + 1] * vv[i] +
            2.0 * uv[i + 1] * vv[i + 1]);
  }
  return acc;
}

double dirichlet_D(const GridFunction& u, const GridFunction& v) {
  require_same_mesh(u, v);
  const Mesh& m = *u.mesh();
  double acc = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) {
    acc += u.slope(c) * v.slope(c) * m.cell_width(c);
  }
  return acc;
}

double inner_e_alpha(const GridFunction& u, const GridFunction& v,
                     const FormParams& p) {
  if (p.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  double acc = 0.5 * dirichlet_D(u, v);
  if (p.alpha > 0.0) acc += p.alpha * inner_L2(u, v);
  return acc;
}

double default_membership_tol(const GridFunction& u) {
  const double window_len = u.mesh()->window().length();
  return 1e-9 * (u.max_abs() / window_len + u.max_abs_slope());
}

MembershipResult membership_F_s(const GridFunction& u, double tol) {
  if (tol < 0.0) tol = default_membership_tol(u);
  const Mesh& m = *u.mesh();
  double worst = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) {
    if (!m.cell_in_g(c)) worst = std::max(worst, std::abs(u.slope(c)));
  }
  return {worst <= tol, worst, tol};
}

double form_subspace(const GridFunction& u, const GridFunction& v) {
  require_same_mesh(u, v);
  if (!membership_F_s(u).member || !membership_F_s(v).member) {
    throw std::domain_error("not in F^(s)");
  }
  const Mesh& m = *u.mesh();
  double acc = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) {
    if (m.cell_in_g(c)) acc += u.slope(c) * v.slope(c) * m.cell_width(c);
  }
  return 0.5 * acc;
}

double e1_norm(const GridFunction& u) {
  return std::sqrt(inner_e_alpha(u, u, FormParams{1.0}));
}

void write_csv(const GridFunction& u, std::ostream& out) {
  out << "x,value\n";
  char buf[80];
  const auto& xs = u.mesh()->nodes();
  for (size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", xs[i], u.values()[i]);
    out << buf;
  }
}

}  // namespace sobdecomp
