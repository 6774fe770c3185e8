#pragma once

// Configuration-driven scenario runner: parses a strict JSON config, runs one
// of the named scenarios, evaluates its pass/fail gates, and writes
// convergence CSV tables, a summary JSON and optional SVG plots.

#include "ahmass/chartlab.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace ahmass::runner {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureConfig {
  int sphere_order = 16;
  int radial_order = 16;
  int kernel_radial_order = 64;
  int kernel_angular_order = 16;
};

struct CutoffConfig {
  std::string profile = "quintic";  // quintic | septic
  double k_min = 4.0;
  double k_max = 10.0;
};

struct ZetaConfig {
  std::string kind = "radial";  // radial | rotation | translation
  double amplitude = 0.3;
  double decay = 2.0;
  double inner_radius = 2.5;
};

struct Tolerances {
  double mass_rel = 0.01;     // mass / rotation / gauge gates
  double mix_rel = 0.02;      // boost mixing gate
  double selftest = 1e-10;    // integral identity gate
  double eigen_rel = 1e-6;    // eigenfunction selftest gate
  double residual = 1e-4;     // FD eigen-equation residual gate
};

struct RunConfig {
  int dimension = 3;
  std::string scenario;
  double m0 = 0.05;
  Vec harmonics = (Vec(1) << 1.0).finished();  // wang boundary data
  double rapidity = 0.3;
  double angle = M_PI / 2.0;
  ZetaConfig zeta;
  QuadratureConfig quadrature;
  CutoffConfig cutoff;
  double fd_step = 1e-5;
  Tolerances tolerances;
  std::uint64_t rng_seed = 24601;
  std::string out_dir = ".";
  bool write_csv = true;
  bool write_plots = true;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

struct GateResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ChargeTable {
  std::string name;
  ChargeResult result;
};

struct RunReport {
  std::string scenario;
  int dimension = 3;
  std::vector<ChargeTable> charges;
  std::optional<Vec> mass;
  std::vector<GateResult> gates;
  std::map<std::string, double> timings_ms;
  bool numerics_ok = true;
  bool gates_ok = true;
};

RunReport run(const RunConfig& config);
void write_outputs(const RunReport& report, const RunConfig& config);

std::string list_scenarios();
// 0: gates pass; 1: a gate failed; 3: numerical non-convergence.
int exit_code(const RunReport& report);

std::string summary_json(const RunReport& report);
std::string charge_csv(const ChargeTable& table);
std::string charge_svg(const ChargeTable& table);

}  // namespace ahmass::runner
