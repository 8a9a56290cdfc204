#include "quadropt/shell.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "quadropt/errors.hpp"
#include "quadropt/parallel.hpp"

namespace quadropt::shell {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::map<Mode, std::string> kModeNames = {
    {Mode::emit_spectrum, "emit-spectrum"},
    {Mode::scatter_spectrum, "scatter-spectrum"},
    {Mode::emit_entropy_sweep, "emit-entropy-sweep"},
    {Mode::scatter_entropy_sweep, "scatter-entropy-sweep"},
    {Mode::resonances, "resonances"},
    {Mode::oracle_check, "oracle-check"},
    {Mode::figure, "figure"},
};

const std::set<std::string> kFigures = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};

constexpr double kNormTolerance = 1e-3;
constexpr double kImagTolerance = 1e-12;
constexpr double kCoverageTolerance = 1e-4;

double parse_double(const std::string &text, const std::string &what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception &) {
    throw ConfigError("cannot parse " + what + " '" + text + "'");
  }
  if (used != text.size())
    throw ConfigError("cannot parse " + what + " '" + text + "'");
  return v;
}

int fock_index(const StateSpec &s) {
  return s.kind == StateKind::fock ? static_cast<int>(s.value) : 0;
}

json derived_json(const SystemParams &p) {
  const auto d = derive_dressed(p);
  return {{"omega_m1", d.omega_m1}, {"delta1", d.delta1}, {"eta1", d.eta1}};
}

json lines_json(const std::vector<ResonanceLine> &lines, std::size_t keep) {
  std::vector<ResonanceLine> strongest = lines;
  std::sort(strongest.begin(), strongest.end(),
            [](const auto &a, const auto &b) { return a.weight > b.weight; });
  if (strongest.size() > keep)
    strongest.resize(keep);
  std::sort(strongest.begin(), strongest.end(),
            [](const auto &a, const auto &b) { return a.position < b.position; });
  json out = json::array();
  for (const auto &l : strongest)
    if (l.weight >= 1e-6)
      out.push_back({{"n", l.n},
                     {"m", l.m},
                     {"position", l.position},
                     {"weight", l.weight},
                     {"label", l.transition_label}});
  return out;
}

json injection_json(int n0, const SystemParams &p) {
  const auto d = derive_dressed(p);
  json out = json::array();
  for (int n = n0 % 2; n < std::min(p.n_squeezed, 8); n += 2)
    out.push_back({{"n", n}, {"delta0", d.delta1 + n * d.omega_m1 - n0}});
  return out;
}

// The damping estimate makes the mechanical frequency complex, so the
// spectrum no longer integrates to one and only the imaginary part is checked.
void check_spectrum(const SpectralDensity &s, const MechState &initial, bool damped,
                    Dataset &out) {
  out.metadata["normalization"] = {{"norm", s.norm},
                                   {"tail_correction", s.tail_correction},
                                   {"total", s.total()},
                                   {"max_imag", s.max_imag}};
  out.metadata["truncation"] = {{"truncated_weight", s.truncated_weight},
                                {"uncovered_weight", s.uncovered_weight},
                                {"initial_trace_deficit", initial.trace_deficit}};
  out.metadata["tolerances"] = {{"normalization", kNormTolerance},
                                {"imaginary_part", kImagTolerance},
                                {"coverage", kCoverageTolerance},
                                {"truncation", kTruncationTolerance}};
  for (std::size_t k = 0; k < s.values.size(); ++k)
    out.rows.push_back({s.grid.at(static_cast<int>(k)), s.values[k]});
  out.columns = {"delta_k", "s_value"};

  if (s.max_imag > kImagTolerance * std::max(1.0, s.max_value()))
    out.tolerance_failure = "spectrum imaginary part " + format_number(s.max_imag);
  else if (!damped && initial.is_pure() && std::abs(s.total() - 1.0) > kNormTolerance)
    out.tolerance_failure = "spectrum normalisation " + format_number(s.total()) +
                            " outside 1 +- " + format_number(kNormTolerance);
}

Dataset run_emit_spectrum(const RunConfig &c, Dataset out) {
  const auto initial = initial_state(c.initial, c.params);
  const auto s = emission_spectrum(initial, c.params, c.grid);
  check_spectrum(s, initial, c.params.damping.has_value(), out);
  out.metadata["resonance_lines"] =
      lines_json(resonance_lines(initial, c.params, c.params.n_squeezed), 24);
  return out;
}

Dataset run_scatter_spectrum(const RunConfig &c, Dataset out) {
  const auto initial = initial_state(c.initial, c.params);
  const WavePacket packet{c.resolve_delta0(c.params), c.epsilon};
  const auto s = scattering_spectrum(initial, packet, c.params, c.grid);
  check_spectrum(s, initial, c.params.damping.has_value(), out);
  out.metadata["packet"] = {{"delta0", packet.delta0}, {"epsilon", packet.epsilon}};
  out.metadata["resonance_lines"] =
      lines_json(resonance_lines(initial, c.params, c.params.n_squeezed), 24);
  out.metadata["injection_lines"] = injection_json(fock_index(c.initial), c.params);
  return out;
}

SystemParams with_variable(SystemParams p, const std::string &var, double v) {
  if (var == "g0")
    p.g0 = v;
  else if (var == "gamma_c")
    p.gamma_c = v;
  return p;
}

Dataset run_emit_sweep(const RunConfig &c, Dataset out) {
  const auto xs = c.sweep->values();
  std::vector<double> ys(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const auto p = with_variable(c.params, c.sweep->variable, xs[i]);
    ys[i] = emission_entropy(initial_state(c.initial, p), p);
  });
  out.columns = {"sweep_value", "entropy"};
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.rows.push_back({xs[i], ys[i]});
  out.metadata["sweep"] = c.sweep->to_string();
  return out;
}

Dataset run_scatter_sweep(const RunConfig &c, Dataset out) {
  const auto xs = c.sweep->values();
  const std::string &var = c.sweep->variable;
  std::vector<double> ys(xs.size()), centres(xs.size());
  if (var == "delta0") {
    ys = scattering_entropy_profile(initial_state(c.initial, c.params), c.params, xs, c.epsilon);
    centres = xs;
    out.metadata["injection_lines"] = injection_json(fock_index(c.initial), c.params);
  } else {
    parallel_for(xs.size(), [&](std::size_t i) {
      const auto p = with_variable(c.params, var, xs[i]);
      const double eps = var == "epsilon" ? xs[i] : c.epsilon;
      centres[i] = c.resolve_delta0(p);
      const double d0[] = {centres[i]};
      ys[i] = scattering_entropy_profile(initial_state(c.initial, p), p, d0, eps)[0];
    });
    out.metadata["packet_centres"] = centres;
  }
  out.columns = {"sweep_value", "entropy"};
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.rows.push_back({xs[i], ys[i]});
  out.metadata["sweep"] = c.sweep->to_string();
  return out;
}

Dataset run_resonances(const RunConfig &c, Dataset out) {
  const auto initial = initial_state(c.initial, c.params);
  const auto lines = resonance_lines(initial, c.params, c.params.n_squeezed);
  out.columns = {"n", "m", "position", "weight"};
  json labels = json::array();
  for (const auto &l : lines) {
    out.rows.push_back({double(l.n), double(l.m), l.position, l.weight});
    labels.push_back(l.transition_label);
  }
  out.metadata["labels"] = labels;
  out.metadata["injection_lines"] = injection_json(fock_index(c.initial), c.params);
  return out;
}

Dataset run_oracle(const RunConfig &c, Dataset out) {
  if (c.initial.kind != StateKind::fock)
    throw ConfigError("oracle-check needs a Fock initial state");
  const int n0 = fock_index(c.initial);
  oracle::ContinuumGrid grid{c.oracle.span, c.oracle.spacing};
  const double t_final = 20.0 / c.params.gamma_c;
  const double lead = c.scattering() ? 4.0 / c.params.gamma_c : 0.0;
  const auto modes = grid.frequency_grid();
  const auto initial = initial_state(c.initial, c.params);

  oracle::AmplitudeField start;
  SpectralDensity closed;
  if (c.scattering()) {
    const WavePacket packet{c.resolve_delta0(c.params), c.epsilon};
    grid.validate(c.params, t_final + lead, packet.epsilon);
    start = oracle::scattering_start(n0, packet, c.params, grid, lead);
    closed = scattering_spectrum(initial, packet, c.params, modes);
    out.metadata["packet"] = {{"delta0", packet.delta0}, {"epsilon", packet.epsilon}};
  } else {
    grid.validate(c.params, t_final);
    start = oracle::emission_start(n0, c.params, grid);
    closed = emission_spectrum(initial, c.params, modes);
  }
  oracle::IntegratorOptions opts;
  opts.dt = c.oracle.dt;
  const auto field = oracle::integrate_amplitudes(start, c.params, grid, t_final, opts);
  const auto rec = oracle::compare_report(closed, field, grid);
  const auto s = oracle::oracle_spectrum(field, grid);

  out.columns = {"delta_k", "s_value", "s_closed_form"};
  for (int k = 0; k < modes.points; ++k)
    out.rows.push_back({modes.at(k), s[k], closed.values[k]});
  out.metadata["process"] = c.scattering() ? "scattering" : "emission";
  out.metadata["continuum"] = {{"span", grid.span},
                               {"spacing", grid.spacing},
                               {"modes", grid.k_count()},
                               {"t_final", t_final},
                               {"lead_time", lead},
                               {"dt", opts.dt}};
  out.metadata["norm"] = {{"start", start.norm()},
                          {"end", field.norm()},
                          {"cavity_population_end", field.cavity_population()}};
  out.metadata["discrepancy"] = {{"linf_relative", rec.linf_relative},
                                 {"l2_relative", rec.l2_relative},
                                 {"worst_delta", rec.worst_delta},
                                 {"tolerance", rec.tolerance},
                                 {"points", rec.points},
                                 {"pass", rec.pass}};
  if (!rec.pass)
    out.tolerance_failure = "oracle discrepancy " + format_number(rec.linf_relative) +
                            " above " + format_number(rec.tolerance);
  return out;
}

RunConfig preset_base(Mode mode, double g0, double gamma_c, const std::string &initial) {
  RunConfig c;
  c.mode = mode;
  c.params.g0 = g0;
  c.params.gamma_c = gamma_c;
  c.initial = StateSpec::parse(initial);
  return c;
}

std::string letter(int i) { return std::string(1, static_cast<char>('a' + i)); }

} // namespace

std::string to_string(Mode mode) { return kModeNames.at(mode); }

Mode parse_mode(const std::string &text) {
  for (const auto &[mode, name] : kModeNames)
    if (name == text)
      return mode;
  throw ConfigError("unknown mode '" + text + "'");
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

SweepSpec SweepSpec::parse(const std::string &text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');)
    parts.push_back(item);
  if (parts.size() != 4)
    throw ConfigError("sweep must look like VAR:MIN:MAX:POINTS, got '" + text + "'");
  SweepSpec s;
  s.variable = parts[0];
  s.min = parse_double(parts[1], "sweep minimum");
  s.max = parse_double(parts[2], "sweep maximum");
  const double n = parse_double(parts[3], "sweep point count");
  if (n != std::floor(n) || n < 2)
    throw ConfigError("sweep needs an integer point count >= 2");
  s.points = static_cast<int>(n);
  if (!(s.min < s.max))
    throw ConfigError("sweep bounds must satisfy MIN < MAX");
  return s;
}

std::string SweepSpec::to_string() const {
  return variable + ":" + format_number(min) + ":" + format_number(max) + ":" +
         std::to_string(points);
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i)
    v[i] = min + (max - min) * i / (points - 1);
  return v;
}

void RunConfig::validate() const {
  params.validate();
  grid.validate();
  if (!(epsilon > 0.0))
    throw ParameterError("epsilon must be positive");
  if (delta0 && delta0_resonance)
    throw ConfigError("give delta0 or delta0_resonance, not both");
  if (delta0_resonance && *delta0_resonance < 0)
    throw ConfigError("delta0_resonance must be non-negative");
  if (!(oracle.span > 0.0 && oracle.spacing > 0.0 && oracle.dt > 0.0))
    throw ConfigError("oracle span, spacing and dt must be positive");

  const bool sweep_mode = mode == Mode::emit_entropy_sweep || mode == Mode::scatter_entropy_sweep;
  if (sweep && !sweep_mode)
    throw ConfigError("a sweep is only used by the entropy sweep modes");
  if (sweep_mode && !sweep)
    throw ConfigError(to_string(mode) + " needs --sweep VAR:MIN:MAX:POINTS");
  if (sweep && !(sweep->min < sweep->max && sweep->points >= 2))
    throw ConfigError("sweep bounds must satisfy MIN < MAX with at least two points");

  switch (mode) {
  case Mode::scatter_spectrum:
    if (!scattering())
      throw ConfigError("scatter-spectrum needs delta0 or delta0_resonance");
    break;
  case Mode::emit_entropy_sweep:
    if (sweep->variable != "g0" && sweep->variable != "gamma_c")
      throw ConfigError("emit-entropy-sweep sweeps g0 or gamma_c, not '" + sweep->variable + "'");
    break;
  case Mode::scatter_entropy_sweep: {
    const std::string &v = sweep->variable;
    if (v != "delta0" && v != "g0" && v != "gamma_c" && v != "epsilon")
      throw ConfigError("scatter-entropy-sweep sweeps delta0, g0, gamma_c or epsilon, not '" + v +
                        "'");
    if (v == "delta0" && scattering())
      throw ConfigError("a delta0 sweep sets the packet centre itself");
    if (v != "delta0" && !scattering())
      throw ConfigError("scatter-entropy-sweep needs delta0 or delta0_resonance");
    if (v != "delta0" && !(sweep->min > (v == "g0" ? -0.25 : 0.0)))
      throw ParameterError("sweep of " + v + " leaves the allowed domain");
    break;
  }
  case Mode::figure:
    if (!figure)
      throw ConfigError("figure mode needs --figure");
    if (!kFigures.count(*figure))
      throw ConfigError("unknown figure preset '" + *figure + "'");
    break;
  default:
    break;
  }
  if (mode == Mode::emit_entropy_sweep && !(sweep->min > (sweep->variable == "g0" ? -0.25 : 0.0)))
    throw ParameterError("sweep of " + sweep->variable + " leaves the allowed domain");
}

double RunConfig::resolve_delta0(const SystemParams &p) const {
  if (delta0)
    return *delta0;
  if (!delta0_resonance)
    throw ConfigError("no packet centre configured");
  const auto d = derive_dressed(p);
  return d.delta1 + *delta0_resonance * d.omega_m1 - fock_index(initial);
}

json RunConfig::to_json() const {
  json j;
  j["mode"] = to_string(mode);
  j["g0"] = params.g0;
  j["gamma_c"] = params.gamma_c;
  j["n_fock"] = params.n_fock;
  j["n_squeezed"] = params.n_squeezed;
  if (params.damping)
    j["damping"] = {{"gamma_m", params.damping->gamma_m}, {"nbar_th", params.damping->nbar_th}};
  j["initial"] = initial.to_string();
  if (delta0)
    j["delta0"] = *delta0;
  if (delta0_resonance)
    j["delta0_resonance"] = *delta0_resonance;
  j["epsilon"] = epsilon;
  j["grid"] = grid.to_string();
  if (sweep)
    j["sweep"] = sweep->to_string();
  if (figure)
    j["figure"] = *figure;
  j["format"] = format == Format::csv ? "csv" : "json";
  j["oracle_span"] = oracle.span;
  j["oracle_spacing"] = oracle.spacing;
  j["oracle_dt"] = oracle.dt;
  return j;
}

RunConfig RunConfig::from_json(const json &doc) {
  if (!doc.is_object())
    throw ConfigError("config must be a JSON object");
  const json &j = doc.contains("config") ? doc.at("config") : doc;
  if (!j.is_object())
    throw ConfigError("config member must be a JSON object");

  static const std::set<std::string> known = {
      "mode",  "g0",     "gamma_c", "n_fock", "n_squeezed", "damping",     "initial",
      "delta0", "delta0_resonance", "epsilon", "grid", "sweep", "figure", "out", "format",
      "oracle_span", "oracle_spacing", "oracle_dt"};
  for (const auto &item : j.items())
    if (!known.count(item.key()))
      throw ConfigError("unknown config key '" + item.key() + "'");

  RunConfig c;
  try {
    if (j.contains("mode"))
      c.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("g0"))
      c.params.g0 = j.at("g0").get<double>();
    if (j.contains("gamma_c"))
      c.params.gamma_c = j.at("gamma_c").get<double>();
    if (j.contains("n_fock"))
      c.params.n_fock = j.at("n_fock").get<int>();
    if (j.contains("n_squeezed"))
      c.params.n_squeezed = j.at("n_squeezed").get<int>();
    if (j.contains("damping") && !j.at("damping").is_null()) {
      const auto &d = j.at("damping");
      for (const auto &item : d.items())
        if (item.key() != "gamma_m" && item.key() != "nbar_th")
          throw ConfigError("unknown damping key '" + item.key() + "'");
      c.params.damping = DampingEstimate{d.value("gamma_m", 0.0), d.value("nbar_th", 0.0)};
    }
    if (j.contains("initial"))
      c.initial = StateSpec::parse(j.at("initial").get<std::string>());
    if (j.contains("delta0") && !j.at("delta0").is_null())
      c.delta0 = j.at("delta0").get<double>();
    if (j.contains("delta0_resonance") && !j.at("delta0_resonance").is_null())
      c.delta0_resonance = j.at("delta0_resonance").get<int>();
    if (j.contains("epsilon"))
      c.epsilon = j.at("epsilon").get<double>();
    if (j.contains("grid"))
      c.grid = FrequencyGrid::parse(j.at("grid").get<std::string>());
    if (j.contains("sweep") && !j.at("sweep").is_null())
      c.sweep = SweepSpec::parse(j.at("sweep").get<std::string>());
    if (j.contains("figure") && !j.at("figure").is_null())
      c.figure = j.at("figure").get<std::string>();
    if (j.contains("out"))
      c.out = j.at("out").get<std::string>();
    if (j.contains("format")) {
      const auto f = j.at("format").get<std::string>();
      if (f != "csv" && f != "json")
        throw ConfigError("format must be csv or json");
      c.format = f == "csv" ? Format::csv : Format::json;
    }
    if (j.contains("oracle_span"))
      c.oracle.span = j.at("oracle_span").get<double>();
    if (j.contains("oracle_spacing"))
      c.oracle.spacing = j.at("oracle_spacing").get<double>();
    if (j.contains("oracle_dt"))
      c.oracle.dt = j.at("oracle_dt").get<double>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception &e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return RunConfig::from_json(doc);
}

std::vector<PresetPanel> figure_preset(const std::string &figure) {
  std::vector<PresetPanel> out;
  if (figure == "fig2") {
    const double panels[4][2] = {{0.1, 0.2}, {0.2, 0.2}, {1.0, 0.2}, {2.0, 1.5}};
    for (int i = 0; i < 4; ++i)
      out.push_back({"fig2" + letter(i),
                     preset_base(Mode::emit_spectrum, panels[i][0], panels[i][1], "fock:0")});
  } else if (figure == "fig3") {
    for (const char *s : {"fock:0", "fock:1", "coherent:1", "thermal:1"}) {
      std::string tag = s;
      tag.erase(std::remove(tag.begin(), tag.end(), ':'), tag.end());
      out.push_back({"fig3_" + tag, preset_base(Mode::emit_spectrum, 0.6, 0.2, s)});
    }
  } else if (figure == "fig4") {
    for (int n0 = 0; n0 < 3; ++n0) {
      auto c = preset_base(Mode::emit_entropy_sweep, 0.0, 0.2, "fock:" + std::to_string(n0));
      c.sweep = SweepSpec::parse("g0:0:1.2:121");
      out.push_back({"fig4_fock" + std::to_string(n0), c});
    }
  } else if (figure == "fig5") {
    const double panels[4][2] = {{0.1, 0.2}, {0.8, 0.2}, {1.2, 0.2}, {2.0, 1.5}};
    for (int i = 0; i < 4; ++i) {
      auto c = preset_base(Mode::scatter_spectrum, panels[i][0], panels[i][1], "fock:0");
      c.delta0_resonance = 0;
      c.epsilon = 1.2;
      out.push_back({"fig5" + letter(i), c});
    }
  } else if (figure == "fig6") {
    struct P {
      double g0, gamma;
      int n;
      const char *initial;
    };
    const P panels[4] = {
        {2.0, 1.5, 0, "fock:0"}, {0.8, 0.2, 0, "fock:0"}, {0.8, 0.2, 2, "fock:0"},
        {0.8, 0.2, 0, "coherent:1"}};
    for (int i = 0; i < 4; ++i) {
      auto c = preset_base(Mode::scatter_spectrum, panels[i].g0, panels[i].gamma, panels[i].initial);
      c.delta0_resonance = panels[i].n;
      c.epsilon = 0.02;
      out.push_back({"fig6" + letter(i), c});
    }
  } else if (figure == "fig7") {
    for (double g0 : {0.4, 0.8, 1.2}) {
      auto c = preset_base(Mode::scatter_entropy_sweep, g0, 0.2, "fock:0");
      c.epsilon = 0.02;
      c.sweep = SweepSpec::parse("delta0:-1:6:701");
      std::string tag = format_number(g0);
      std::replace(tag.begin(), tag.end(), '.', 'p');
      out.push_back({"fig7a_g0_" + tag, c});
    }
    for (int n0 = 0; n0 < 3; ++n0) {
      auto c = preset_base(Mode::scatter_entropy_sweep, 0.1, 0.2, "fock:" + std::to_string(n0));
      c.epsilon = 0.02;
      c.delta0_resonance = n0;
      c.sweep = SweepSpec::parse("g0:0.1:1:91");
      out.push_back({"fig7b_fock" + std::to_string(n0), c});
    }
  } else {
    throw ConfigError("unknown figure preset '" + figure + "'");
  }
  return out;
}

Dataset run_single(const RunConfig &config, const std::string &name) {
  config.validate();
  if (config.mode == Mode::figure)
    throw ConfigError("run_single cannot expand a figure preset");
  const auto start = std::chrono::steady_clock::now();
  Dataset out;
  out.name = name;
  out.config = config;
  out.config.out.clear();
  out.metadata["derived"] = derived_json(config.params);
  out.metadata["ambiguous_sideband_regime"] = ambiguous_sideband_regime(config.params);
  out.metadata["overlap_orthonormality_defect"] = overlap_matrix(config.params).orthonormality_defect;

  switch (config.mode) {
  case Mode::emit_spectrum:
    out = run_emit_spectrum(config, std::move(out));
    break;
  case Mode::scatter_spectrum:
    out = run_scatter_spectrum(config, std::move(out));
    break;
  case Mode::emit_entropy_sweep:
    out = run_emit_sweep(config, std::move(out));
    break;
  case Mode::scatter_entropy_sweep:
    out = run_scatter_sweep(config, std::move(out));
    break;
  case Mode::resonances:
    out = run_resonances(config, std::move(out));
    break;
  case Mode::oracle_check:
    out = run_oracle(config, std::move(out));
    break;
  case Mode::figure:
    break;
  }
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<Dataset> run(const RunConfig &config) {
  config.validate();
  if (config.mode != Mode::figure)
    return {run_single(config)};
  std::vector<Dataset> out;
  for (auto &panel : figure_preset(*config.figure)) {
    panel.config.format = config.format;
    out.push_back(run_single(panel.config, panel.name));
  }
  return out;
}

std::string render_csv(const Dataset &data) {
  std::ostringstream os;
  const auto &d = data.metadata.at("derived");
  os << "# quadropt " << to_string(data.config.mode) << "\n";
  os << "# config: " << data.config.to_json().dump() << "\n";
  for (const char *key : {"omega_m1", "delta1", "eta1"})
    os << "# " << key << ": " << format_number(d.at(key).get<double>()) << "\n";
  if (data.metadata.contains("normalization")) {
    const auto &n = data.metadata.at("normalization");
    os << "# norm: " << format_number(n.at("norm").get<double>()) << "\n";
    os << "# tail_correction: " << format_number(n.at("tail_correction").get<double>()) << "\n";
  }
  if (data.metadata.contains("packet"))
    os << "# delta0: " << format_number(data.metadata["packet"]["delta0"].get<double>()) << "\n";
  for (std::size_t i = 0; i < data.columns.size(); ++i)
    os << (i ? "," : "") << data.columns[i];
  os << "\n";
  for (const auto &row : data.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << format_number(row[i]);
    os << "\n";
  }
  return os.str();
}

json render_sidecar(const Dataset &data) {
  json j;
  j["dataset"] = data.name;
  j["config"] = data.config.to_json();
  j["columns"] = data.columns;
  j["rows"] = data.rows.size();
  j["derived"] = data.metadata.at("derived");
  j["metadata"] = data.metadata;
  j["wall_time_s"] = data.wall_time;
  j["tolerance_ok"] = data.tolerance_failure.empty();
  if (!data.tolerance_failure.empty())
    j["tolerance_failure"] = data.tolerance_failure;
  return j;
}

json render_json(const Dataset &data) {
  json j = render_sidecar(data);
  j["data"] = data.rows;
  return j;
}

void write_atomic(const std::string &path, const std::string &content) {
  const fs::path target(path);
  if (target.has_parent_path())
    fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out)
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

std::vector<std::string> write_outputs(const std::vector<Dataset> &data, const RunConfig &config) {
  std::vector<std::string> written;
  const bool json_only = config.format == Format::json;
  if (config.out.empty()) {
    if (data.size() != 1)
      throw ConfigError("figure runs need --out DIR");
    std::cout << (json_only ? render_json(data[0]).dump(2) + "\n" : render_csv(data[0]));
    return written;
  }

  // stem carries no extension; a user-supplied .csv or .json is dropped.
  auto emit = [&](const Dataset &d, const std::string &stem) {
    if (json_only) {
      const auto path = stem + ".json";
      write_atomic(path, render_json(d).dump(2) + "\n");
      written.push_back(path);
    } else {
      const auto csv = stem + ".csv";
      const auto side = stem + ".json";
      write_atomic(csv, render_csv(d));
      write_atomic(side, render_sidecar(d).dump(2) + "\n");
      written.push_back(csv);
      written.push_back(side);
    }
  };

  if (config.mode == Mode::figure) {
    for (const auto &d : data)
      emit(d, (fs::path(config.out) / d.name).string());
  } else {
    fs::path stem(config.out);
    if (stem.extension() == ".csv" || stem.extension() == ".json")
      stem.replace_extension();
    emit(data.at(0), stem.string());
  }
  return written;
}

} // namespace quadropt::shell
