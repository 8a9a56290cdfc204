#pragma once

// Batch front end: run configuration, dispatch to the physics modules,
// figure presets and CSV / JSON output.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadropt/oracle.hpp"

namespace quadropt::shell {

enum class Mode {
  emit_spectrum,
  scatter_spectrum,
  emit_entropy_sweep,
  scatter_entropy_sweep,
  resonances,
  oracle_check,
  figure
};

std::string to_string(Mode mode);
Mode parse_mode(const std::string &text);

enum class Format { csv, json };

// VAR:MIN:MAX:POINTS, inclusive end points.
struct SweepSpec {
  std::string variable;
  double min = 0.0;
  double max = 1.0;
  int points = 2;

  static SweepSpec parse(const std::string &text);
  std::string to_string() const;
  std::vector<double> values() const;
  double step() const { return points > 1 ? (max - min) / (points - 1) : 0.0; }
};

struct OracleSettings {
  double span = 15.0;
  double spacing = 0.005;
  double dt = 0.01;
};

struct RunConfig {
  Mode mode = Mode::emit_spectrum;
  SystemParams params;
  StateSpec initial;
  std::optional<double> delta0;
  // Packet centre on the injection line delta1 + N omega_m1 - n0, where n0
  // is the Fock index of the initial state (0 for other states).
  std::optional<int> delta0_resonance;
  double epsilon = 0.02;
  FrequencyGrid grid;
  std::optional<SweepSpec> sweep;
  std::optional<std::string> figure;
  std::string out;
  Format format = Format::csv;
  OracleSettings oracle;

  // Throws ConfigError or ParameterError.
  void validate() const;
  bool scattering() const { return delta0.has_value() || delta0_resonance.has_value(); }
  // Packet centre for the given parameters; requires scattering().
  double resolve_delta0(const SystemParams &params) const;

  // Every field except `out`, so that echoed configs do not depend on where
  // the result was written.
  nlohmann::json to_json() const;
  // Accepts a bare config object or any document with a "config" member
  // (sidecars). Unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json &doc);
};

RunConfig load_config(const std::string &path);

struct Dataset {
  std::string name;
  RunConfig config; // single-run config that reproduces this dataset
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::json metadata = nlohmann::json::object();
  double wall_time = 0.0;
  // Empty when every checked tolerance held.
  std::string tolerance_failure;
};

// Figure presets expanded into named single-run configs.
struct PresetPanel {
  std::string name;
  RunConfig config;
};
std::vector<PresetPanel> figure_preset(const std::string &figure);

Dataset run_single(const RunConfig &config, const std::string &name = "result");
std::vector<Dataset> run(const RunConfig &config);

std::string render_csv(const Dataset &data);
nlohmann::json render_sidecar(const Dataset &data);
nlohmann::json render_json(const Dataset &data);

// Writes content to a temporary sibling and renames it over path.
void write_atomic(const std::string &path, const std::string &content);

// Writes every dataset according to config.out and config.format and
// returns the paths written. An empty `out` prints a single dataset to
// stdout; figure runs need a directory.
std::vector<std::string> write_outputs(const std::vector<Dataset> &data, const RunConfig &config);

std::string format_number(double v);

} // namespace quadropt::shell
