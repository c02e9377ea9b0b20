#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sobdecomp/function_space.hpp"
#include "sobdecomp/geometry.hpp"

namespace sobdecomp {

/// Configuration validation failure carrying the path of the offending
/// field (e.g. "f_spec.width"). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config error at '" + field + "': " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct IntervalsSpec {
  std::vector<Interval> intervals;
};

struct CantorSpec {
  Interval base;
  int depth = 0;
  double ratio = 0.0;
};

using GSpec = std::variant<IntervalsSpec, CantorSpec>;

struct HatSpec {
  double center = 0.0;
  double width = 0.0;  // full support width
};

struct GaussianSpec {
  double center = 0.0;
  double sigma = 0.0;
};

struct SamplesSpec {
  std::vector<double> x;
  std::vector<double> y;
};

struct PolynomialSpec {
  std::vector<double> coeffs;  // ascending powers
  Interval support;            // evaluation clamps outside
};

using FSpec = std::variant<HatSpec, GaussianSpec, SamplesSpec, PolynomialSpec>;

struct Tolerances {
  double orth_residual = 1e-8;
  double pythagoras_gap = 1e-8;
  double three_way_gap = 1e-8;
  double linearity = 1e-10;
  double zero_slope_spread = 1e-9;
  double ode_scale = 10.0;        // ode tol = ode_scale * h^2
  double neumann_scale = 1e-9;    // neumann tol = scale * (1 + max|f'|)
  double membership_scale = 10.0; // membership tol = scale * h^2 * (1+||u||)
};

struct RunConfig {
  Interval window{0.0, 1.0};
  GSpec g_spec;
  double alpha = 0.0;
  double mesh_h = 0.0;
  FSpec f_spec;
  std::pair<bool, bool> flank_unbounded{false, false};
  Tolerances tol;
  std::uint64_t seed = 0;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_file(const std::string& path);

OpenSetG build_geometry(const RunConfig& cfg);
MeshPtr build_mesh(const RunConfig& cfg);
GridFunction sample_f(const RunConfig& cfg, const MeshPtr& mesh);

nlohmann::ordered_json config_echo(const RunConfig& cfg);

}  // namespace sobdecomp
