// quadropt: batch datasets for single-photon emission and scattering in a
// quadratically coupled optomechanical cavity.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "quadropt/errors.hpp"
#include "quadropt/shell.hpp"

using namespace quadropt;
using nlohmann::json;

namespace {

constexpr int kConfigFailure = 1;
constexpr int kNumericFailure = 2;

int report(const std::string &kind, const std::string &message, int code,
           json extra = json::object()) {
  json err = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  err.update(extra);
  std::cerr << json{{"error", err}}.dump() << "\n";
  return code;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Single-photon spectra and phonon entanglement for a membrane-in-the-middle "
               "cavity with quadratic coupling"};
  app.set_version_flag("--version", "quadropt 1.0");

  std::string mode_text, config_path, initial, grid, sweep, figure, out, format;
  std::optional<double> g0, gamma_c, delta0, epsilon, gamma_m, nbar_th;
  std::optional<int> n_fock, n_squeezed, delta0_resonance;

  app.add_option("mode", mode_text,
                 "emit-spectrum | scatter-spectrum | emit-entropy-sweep | "
                 "scatter-entropy-sweep | resonances | oracle-check | figure");
  app.add_option("--config", config_path, "JSON run configuration (or a sidecar)");
  app.add_option("--g0", g0, "quadratic coupling g0 / omega_M");
  app.add_option("--gamma-c", gamma_c, "cavity decay rate gamma_c / omega_M");
  app.add_option("--n-fock", n_fock, "bare phonon basis size");
  app.add_option("--n-squeezed", n_squeezed, "squeezed phonon basis size");
  app.add_option("--gamma-m", gamma_m, "mechanical decay rate (enables damping estimate)");
  app.add_option("--nbar-th", nbar_th, "thermal phonon number for the damping estimate");
  app.add_option("--initial", initial, "fock:N | coherent:B | thermal:NBAR");
  app.add_option("--delta0", delta0, "incident packet centre");
  app.add_option("--delta0-resonance", delta0_resonance,
                 "put the packet centre on injection line N: delta1 + N omega_m1 - n0");
  app.add_option("--epsilon", epsilon, "incident packet half-width");
  app.add_option("--grid", grid, "frequency grid MIN:MAX:POINTS");
  app.add_option("--sweep", sweep, "sweep VAR:MIN:MAX:POINTS");
  app.add_option("--figure", figure, "fig2 | fig3 | fig4 | fig5 | fig6 | fig7");
  app.add_option("--out", out, "output file (or directory for figure runs)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0)
      return app.exit(e);
    return report("configuration", e.what(), kConfigFailure);
  }

  shell::RunConfig config;
  try {
    if (!config_path.empty())
      config = shell::load_config(config_path);
    else if (mode_text.empty() && figure.empty())
      throw ConfigError("give a mode, --figure or --config");

    if (!mode_text.empty())
      config.mode = shell::parse_mode(mode_text);
    else if (!figure.empty() && config_path.empty())
      config.mode = shell::Mode::figure;
    if (g0)
      config.params.g0 = *g0;
    if (gamma_c)
      config.params.gamma_c = *gamma_c;
    if (n_fock)
      config.params.n_fock = *n_fock;
    if (n_squeezed)
      config.params.n_squeezed = *n_squeezed;
    if (gamma_m || nbar_th) {
      DampingEstimate d = config.params.damping.value_or(DampingEstimate{});
      if (gamma_m)
        d.gamma_m = *gamma_m;
      if (nbar_th)
        d.nbar_th = *nbar_th;
      config.params.damping = d;
    }
    if (!initial.empty())
      config.initial = StateSpec::parse(initial);
    if (delta0) {
      config.delta0 = *delta0;
      config.delta0_resonance.reset();
    }
    if (delta0_resonance) {
      config.delta0_resonance = *delta0_resonance;
      config.delta0.reset();
    }
    if (epsilon)
      config.epsilon = *epsilon;
    if (!grid.empty())
      config.grid = FrequencyGrid::parse(grid);
    if (!sweep.empty())
      config.sweep = shell::SweepSpec::parse(sweep);
    if (!figure.empty())
      config.figure = figure;
    if (!out.empty())
      config.out = out;
    if (!format.empty())
      config.format = format == "json" ? shell::Format::json : shell::Format::csv;
    config.validate();
  } catch (const std::exception &e) {
    return report("configuration", e.what(), kConfigFailure);
  }

  try {
    const auto data = shell::run(config);
    const auto written = shell::write_outputs(data, config);
    for (const auto &path : written)
      std::cerr << "wrote " << path << "\n";
    for (const auto &d : data)
      if (!d.tolerance_failure.empty())
        return report("tolerance", d.name + ": " + d.tolerance_failure, kNumericFailure);
  } catch (const TruncationError &e) {
    return report("truncation", e.what(), kNumericFailure,
                  {{"deficit", e.deficit()}, {"required_n_fock", e.required_n_fock()}});
  } catch (const ConvergenceError &e) {
    return report("convergence", e.what(), kNumericFailure, {{"achieved", e.achieved()}});
  } catch (const ParameterError &e) {
    return report("configuration", e.what(), kConfigFailure);
  } catch (const ConfigError &e) {
    return report("configuration", e.what(), kConfigFailure);
  } catch (const std::exception &e) {
    return report("runtime", e.what(), kConfigFailure);
  }
  return 0;
}
