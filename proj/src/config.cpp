#include "sobdecomp/config.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace sobdecomp {

namespace {

using nlohmann::json;

Interval parse_interval(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(field, "expected [lo, hi]");
  }
  const double lo = j[0].get<double>();
  const double hi = j[1].get<double>();
  if (!(lo < hi)) throw ConfigError(field, "requires lo < hi");
  return Interval(lo, hi);
}

double parse_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

const json& require(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path, "missing required field");
  return *it;
}

GSpec parse_g_spec(const json& j, const Interval& window) {
  if (!j.is_object()) throw ConfigError("g_spec", "expected an object");
  const std::string type = require(j, "type", "g_spec.type").get<std::string>();
  if (type == "intervals") {
    const json& arr = require(j, "intervals", "g_spec.intervals");
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError("g_spec.intervals", "expected a nonempty array");
    }
    IntervalsSpec spec;
    for (size_t i = 0; i < arr.size(); ++i) {
      spec.intervals.push_back(
          parse_interval(arr[i], "g_spec.intervals[" + std::to_string(i) + "]"));
    }
    return spec;
  }
  if (type == "cantor_complement") {
    CantorSpec spec;
    spec.base = parse_interval(require(j, "base", "g_spec.base"), "g_spec.base");
    const json& depth = require(j, "depth", "g_spec.depth");
    if (!depth.is_number_integer() || depth.get<int>() < 0) {
      throw ConfigError("g_spec.depth", "expected a nonnegative integer");
    }
    spec.depth = depth.get<int>();
    spec.ratio = parse_number(require(j, "ratio", "g_spec.ratio"), "g_spec.ratio");
    if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) {
      throw ConfigError("g_spec.ratio", "must lie in (0, 1)");
    }
    if (!window.contains(spec.base)) {
      throw ConfigError("g_spec.base", "must be contained in window");
    }
    return spec;
  }
  throw ConfigError("g_spec.type",
                    "unknown type '" + type +
                        "' (expected intervals | cantor_complement)");
}

FSpec parse_f_spec(const json& j, const Interval& window) {
  if (!j.is_object()) throw ConfigError("f_spec", "expected an object");
  const std::string type = require(j, "type", "f_spec.type").get<std::string>();
  if (type == "hat") {
    HatSpec spec;
    spec.center = parse_number(require(j, "center", "f_spec.center"), "f_spec.center");
    spec.width = parse_number(require(j, "width", "f_spec.width"), "f_spec.width");
    if (!(spec.width > 0.0)) throw ConfigError("f_spec.width", "must be > 0");
    if (spec.center - spec.width / 2 < window.lo ||
        spec.center + spec.width / 2 > window.hi) {
      throw ConfigError("f_spec.width", "hat support must lie inside window");
    }
    return spec;
  }
  if (type == "gaussian") {
    GaussianSpec spec;
    spec.center = parse_number(require(j, "center", "f_spec.center"), "f_spec.center");
    spec.sigma = parse_number(require(j, "sigma", "f_spec.sigma"), "f_spec.sigma");
    if (!(spec.sigma > 0.0)) throw ConfigError("f_spec.sigma", "must be > 0");
    if (!window.contains(spec.center)) {
      throw ConfigError("f_spec.center", "must lie inside window");
    }
    return spec;
  }
  if (type == "samples") {
    SamplesSpec spec;
    const json& xs = require(j, "x", "f_spec.x");
    const json& ys = require(j, "y", "f_spec.y");
    if (!xs.is_array() || !ys.is_array() || xs.size() != ys.size() ||
        xs.size() < 2) {
      throw ConfigError("f_spec.x", "expected matching x/y arrays, >= 2 points");
    }
    for (size_t i = 0; i < xs.size(); ++i) {
      spec.x.push_back(parse_number(xs[i], "f_spec.x[" + std::to_string(i) + "]"));
      spec.y.push_back(parse_number(ys[i], "f_spec.y[" + std::to_string(i) + "]"));
    }
    for (size_t i = 1; i < spec.x.size(); ++i) {
      if (!(spec.x[i] > spec.x[i - 1])) {
        throw ConfigError("f_spec.x", "sample abscissae must strictly increase");
      }
    }
    if (spec.x.front() < window.lo || spec.x.back() > window.hi) {
      throw ConfigError("f_spec.x", "samples must lie inside window");
    }
    return spec;
  }
  if (type == "polynomial") {
    PolynomialSpec spec{{}, Interval(0.0, 1.0)};
    const json& coeffs = require(j, "coeffs", "f_spec.coeffs");
    if (!coeffs.is_array() || coeffs.empty()) {
      throw ConfigError("f_spec.coeffs", "expected a nonempty array");
    }
    for (size_t i = 0; i < coeffs.size(); ++i) {
      spec.coeffs.push_back(
          parse_number(coeffs[i], "f_spec.coeffs[" + std::to_string(i) + "]"));
    }
    spec.support =
        parse_interval(require(j, "support", "f_spec.support"), "f_spec.support");
    if (!window.contains(spec.support)) {
      throw ConfigError("f_spec.support", "must be contained in window");
    }
    return spec;
  }
  throw ConfigError("f_spec.type",
                    "unknown type '" + type +
                        "' (expected hat | gaussian | samples | polynomial)");
}

void parse_tolerances(const json& j, Tolerances& tol) {
  if (!j.is_object()) throw ConfigError("tolerances", "expected an object");
  auto grab = [&](const char* key, double& slot) {
    auto it = j.find(key);
    if (it == j.end()) return;
    slot = parse_number(*it, std::string("tolerances.") + key);
    if (!(slot > 0.0)) {
      throw ConfigError(std::string("tolerances.") + key, "must be > 0");
    }
  };
  grab("orth_residual", tol.orth_residual);
  grab("pythagoras_gap", tol.pythagoras_gap);
  grab("three_way_gap", tol.three_way_gap);
  grab("linearity", tol.linearity);
  grab("zero_slope_spread", tol.zero_slope_spread);
  grab("ode_scale", tol.ode_scale);
  grab("neumann_scale", tol.neumann_scale);
  grab("membership_scale", tol.membership_scale);
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("", "top-level config must be an object");
  RunConfig cfg;
  cfg.window = parse_interval(require(j, "window", "window"), "window");
  cfg.g_spec = parse_g_spec(require(j, "g_spec", "g_spec"), cfg.window);
  cfg.alpha = parse_number(require(j, "alpha", "alpha"), "alpha");
  if (cfg.alpha < 0.0) throw ConfigError("alpha", "must be >= 0");
  cfg.mesh_h = parse_number(require(j, "mesh_h", "mesh_h"), "mesh_h");
  if (!(cfg.mesh_h > 0.0)) throw ConfigError("mesh_h", "must be > 0");
  cfg.f_spec = parse_f_spec(require(j, "f_spec", "f_spec"), cfg.window);

  if (auto it = j.find("flank_unbounded"); it != j.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_boolean() ||
        !(*it)[1].is_boolean()) {
      throw ConfigError("flank_unbounded", "expected [bool, bool]");
    }
    cfg.flank_unbounded = {(*it)[0].get<bool>(), (*it)[1].get<bool>()};
  }
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer()) {
      throw ConfigError("seed", "expected an integer");
    }
    cfg.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("tolerances"); it != j.end()) {
    parse_tolerances(*it, cfg.tol);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

OpenSetG build_geometry(const RunConfig& cfg) {
  if (const auto* spec = std::get_if<IntervalsSpec>(&cfg.g_spec)) {
    return normalize_intervals(spec->intervals, cfg.window);
  }
  const auto& spec = std::get<CantorSpec>(cfg.g_spec);
  return cantor_complement(spec.base, spec.depth, spec.ratio, cfg.window);
}

MeshPtr build_mesh(const RunConfig& cfg) {
  return Mesh::build(build_geometry(cfg), cfg.mesh_h);
}

GridFunction sample_f(const RunConfig& cfg, const MeshPtr& mesh) {
  if (const auto* hat = std::get_if<HatSpec>(&cfg.f_spec)) {
    const double c = hat->center;
    const double half = hat->width / 2.0;
    return GridFunction::interpolate(mesh, [c, half](double x) {
      return std::max(0.0, 1.0 - std::abs(x - c) / half);
    });
  }
  if (const auto* gauss = std::get_if<GaussianSpec>(&cfg.f_spec)) {
    const double c = gauss->center;
    const double s = gauss->sigma;
    return GridFunction::interpolate(mesh, [c, s](double x) {
      return std::exp(-(x - c) * (x - c) / (2.0 * s * s));
    });
  }
  if (const auto* samples = std::get_if<SamplesSpec>(&cfg.f_spec)) {
    const auto& xs = samples->x;
    const auto& ys = samples->y;
    return GridFunction::interpolate(mesh, [&xs, &ys](double x) {
      if (x <= xs.front()) return ys.front();
      if (x >= xs.back()) return ys.back();
      auto it = std::upper_bound(xs.begin(), xs.end(), x);
      const size_t hi = static_cast<size_t>(it - xs.begin());
      const size_t lo = hi - 1;
      const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
      return ys[lo] + t * (ys[hi] - ys[lo]);
    });
  }
  const auto& poly = std::get<PolynomialSpec>(cfg.f_spec);
  return GridFunction::interpolate(mesh, [&poly](double x) {
    const double t = std::clamp(x, poly.support.lo, poly.support.hi);
    double acc = 0.0;
    for (auto it = poly.coeffs.rbegin(); it != poly.coeffs.rend(); ++it) {
      acc = acc * t + *it;
    }
    return acc;
  });
}

nlohmann::ordered_json config_echo(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["window"] = {cfg.window.lo, cfg.window.hi};
  if (const auto* spec = std::get_if<IntervalsSpec>(&cfg.g_spec)) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Interval& iv : spec->intervals) arr.push_back({iv.lo, iv.hi});
    j["g_spec"] = {{"type", "intervals"}, {"intervals", arr}};
  } else {
    const auto& spec = std::get<CantorSpec>(cfg.g_spec);
    j["g_spec"] = {{"type", "cantor_complement"},
                   {"base", {spec.base.lo, spec.base.hi}},
                   {"depth", spec.depth},
                   {"ratio", spec.ratio}};
  }
  j["alpha"] = cfg.alpha;
  j["mesh_h"] = cfg.mesh_h;
  if (const auto* hat = std::get_if<HatSpec>(&cfg.f_spec)) {
    j["f_spec"] = {{"type", "hat"}, {"center", hat->center}, {"width", hat->width}};
  } else if (const auto* gauss = std::get_if<GaussianSpec>(&cfg.f_spec)) {
    j["f_spec"] = {
        {"type", "gaussian"}, {"center", gauss->center}, {"sigma", gauss->sigma}};
  } else if (const auto* samples = std::get_if<SamplesSpec>(&cfg.f_spec)) {
    j["f_spec"] = {{"type", "samples"}, {"x", samples->x}, {"y", samples->y}};
  } else {
    const auto& poly = std::get<PolynomialSpec>(cfg.f_spec);
    j["f_spec"] = {{"type", "polynomial"},
                   {"coeffs", poly.coeffs},
                   {"support", {poly.support.lo, poly.support.hi}}};
  }
  j["flank_unbounded"] = {cfg.flank_unbounded.first, cfg.flank_unbounded.second};
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace sobdecomp
