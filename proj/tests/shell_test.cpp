#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "quadropt/errors.hpp"
#include "quadropt/shell.hpp"

using namespace quadropt;
using namespace quadropt::shell;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("quadropt_shell_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string &args, const fs::path &err) {
  const char *exe = std::getenv("QUADROPT_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "QUADROPT_CLI is not set");
  const std::string cmd = std::string(exe) + " " + args + " > /dev/null 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig small_emission() {
  RunConfig c;
  c.params.g0 = 0.6;
  c.grid = FrequencyGrid{-4, 4, 201};
  return c;
}

} // namespace

TEST_CASE("mode and sweep parsing") {
  for (auto m : {Mode::emit_spectrum, Mode::scatter_spectrum, Mode::emit_entropy_sweep,
                 Mode::scatter_entropy_sweep, Mode::resonances, Mode::oracle_check, Mode::figure})
    CHECK(parse_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_mode("emit"), ConfigError);

  const auto s = SweepSpec::parse("g0:0:1.2:121");
  CHECK(s.variable == "g0");
  CHECK(s.values().size() == 121);
  CHECK(s.values().back() == 1.2);
  CHECK(s.step() == doctest::Approx(0.01));
  CHECK(s.to_string() == "g0:0:1.2:121");
  CHECK_THROWS_AS(SweepSpec::parse("g0:1:0:5"), ConfigError);
  CHECK_THROWS_AS(SweepSpec::parse("g0:0:1"), ConfigError);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.params.g0 = -0.5;
  CHECK_THROWS_AS(c.validate(), ParameterError);

  c = RunConfig{};
  c.mode = Mode::scatter_spectrum;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.delta0_resonance = 0;
  CHECK_NOTHROW(c.validate());
  c.delta0 = 0.3;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = RunConfig{};
  c.mode = Mode::emit_entropy_sweep;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.sweep = SweepSpec::parse("epsilon:0.1:1:5");
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = RunConfig{};
  c.mode = Mode::figure;
  c.figure = "fig9";
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("packet centre on an injection line") {
  RunConfig c;
  c.params.g0 = 0.8;
  c.initial = StateSpec{StateKind::fock, 1};
  c.delta0_resonance = 2;
  const auto d = derive_dressed(c.params);
  CHECK(c.resolve_delta0(c.params) == doctest::Approx(d.delta1 + 2 * d.omega_m1 - 1));
  c.initial = StateSpec{StateKind::coherent, 1};
  CHECK(c.resolve_delta0(c.params) == doctest::Approx(d.delta1 + 2 * d.omega_m1));
}

TEST_CASE("config JSON round trip and strictness") {
  RunConfig c;
  c.mode = Mode::scatter_entropy_sweep;
  c.params.g0 = 0.8;
  c.params.damping = DampingEstimate{0.001, 0.5};
  c.initial = StateSpec::parse("coherent:0.7");
  c.delta0_resonance = 1;
  c.epsilon = 0.05;
  c.sweep = SweepSpec::parse("g0:0.1:1:10");
  c.out = "somewhere.csv";
  const json j = c.to_json();
  CHECK_FALSE(j.contains("out"));
  const auto back = RunConfig::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(RunConfig::from_json(json{{"config", j}}).to_json() == j);

  json bad = j;
  bad["g_0"] = 0.3;
  CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json::array()), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("figure presets") {
  const auto fig2 = figure_preset("fig2");
  CHECK(fig2.size() == 4);
  for (const auto &p : fig2)
    CHECK(p.config.mode == Mode::emit_spectrum);

  const auto fig4 = figure_preset("fig4");
  REQUIRE(fig4.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const auto &c = fig4[i].config;
    CHECK(c.mode == Mode::emit_entropy_sweep);
    CHECK(c.initial == StateSpec{StateKind::fock, double(i)});
    REQUIRE(c.sweep);
    CHECK(c.sweep->min == 0.0);
    CHECK(c.sweep->max == 1.2);
    CHECK(c.sweep->points == 121);
  }

  for (const auto &p : figure_preset("fig5")) {
    CHECK(p.config.delta0_resonance == 0);
    CHECK(p.config.epsilon == 1.2);
  }
  bool coherent = false;
  for (const auto &p : figure_preset("fig6")) {
    CHECK(p.config.epsilon == 0.02);
    coherent |= p.config.initial.kind == StateKind::coherent;
  }
  CHECK(coherent);
  CHECK(figure_preset("fig3").size() == 4);
  CHECK(figure_preset("fig7").size() == 6);
  CHECK_THROWS_AS(figure_preset("fig1"), ConfigError);
  for (const char *f : {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"})
    for (const auto &p : figure_preset(f))
      CHECK_NOTHROW(p.config.validate());
}

TEST_CASE("CSV output") {
  const auto data = run_single(small_emission(), "probe");
  CHECK(data.tolerance_failure.empty());
  CHECK(data.rows.size() == 201);
  const auto csv = render_csv(data);
  CHECK(csv == render_csv(run_single(small_emission(), "probe")));

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# quadropt emit-spectrum");
  bool omega = false, delta = false;
  int data_lines = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# omega_m1: ", 0) == 0) {
      omega = true;
      CHECK(std::stod(line.substr(12)) == doctest::Approx(1.8439089));
    }
    if (line.rfind("# delta1: ", 0) == 0)
      delta = true;
    if (line == "delta_k,s_value")
      header = true;
    else if (header)
      ++data_lines;
  }
  CHECK(omega);
  CHECK(delta);
  CHECK(header);
  CHECK(data_lines == 201);

  const auto side = render_sidecar(data);
  CHECK(side["rows"] == 201);
  CHECK(side["tolerance_ok"] == true);
  CHECK(RunConfig::from_json(side).to_json() == data.config.to_json());
}

TEST_CASE("other modes produce their columns") {
  RunConfig c = small_emission();
  c.mode = Mode::resonances;
  auto d = run_single(c);
  CHECK(d.columns == std::vector<std::string>{"n", "m", "position", "weight"});
  CHECK(d.metadata["labels"].size() == d.rows.size());

  c = small_emission();
  c.mode = Mode::emit_entropy_sweep;
  c.sweep = SweepSpec::parse("g0:0:0.4:5");
  d = run_single(c);
  CHECK(d.rows.size() == 5);
  CHECK(d.rows[0][1] == doctest::Approx(0.0));

  c = small_emission();
  c.mode = Mode::scatter_spectrum;
  c.delta0_resonance = 0;
  d = run_single(c);
  CHECK(d.metadata["packet"]["delta0"].get<double>() == doctest::Approx(derive_dressed(c.params).delta1));

  c = small_emission();
  c.mode = Mode::oracle_check;
  c.initial = StateSpec::parse("coherent:1");
  CHECK_THROWS_AS(run_single(c), ConfigError);
}

TEST_CASE("file output") {
  const auto dir = scratch_dir("files");
  write_atomic((dir / "sub" / "a.txt").string(), "hello");
  CHECK(slurp(dir / "sub" / "a.txt") == "hello");
  CHECK_FALSE(fs::exists(dir / "sub" / "a.txt.tmp"));

  RunConfig c = small_emission();
  c.out = (dir / "emit.csv").string();
  const auto written = write_outputs(run(c), c);
  CHECK(written.size() == 2);
  CHECK(fs::exists(dir / "emit.csv"));
  CHECK(fs::exists(dir / "emit.json"));

  // The sidecar reproduces the dataset byte for byte.
  RunConfig again = load_config((dir / "emit.json").string());
  again.out = (dir / "again").string();
  write_outputs(run(again), again);
  CHECK(slurp(dir / "again.csv") == slurp(dir / "emit.csv"));

  c.format = Format::json;
  c.out = (dir / "only").string();
  write_outputs(run(c), c);
  const auto j = json::parse(slurp(dir / "only.json"));
  CHECK(j["data"].size() == 201);
  fs::remove_all(dir);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch_dir("cli");
  const auto err = dir / "err.txt";

  CHECK(cli("resonances --g0 0.6 --out " + (dir / "r").string(), err) == 0);
  CHECK(fs::exists(dir / "r.csv"));

  CHECK(cli("emit-spectrum --g0 -0.5", err) == 1);
  auto e = json::parse(slurp(err));
  CHECK(e["error"]["kind"] == "configuration");
  CHECK(e["error"]["exit_code"] == 1);

  CHECK(cli("emit-spectrum --initial fock:45", err) == 2);
  e = json::parse(slurp(err));
  CHECK(e["error"]["kind"] == "truncation");
  CHECK(e["error"]["required_n_fock"].get<int>() > 45);

  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"mode": "emit-spectrum", "g0": 0.2, "gammma_c": 0.3})";
  }
  CHECK(cli("--config " + (dir / "bad.json").string(), err) == 1);
  CHECK(cli("wobble", err) == 1);
  CHECK(cli("", err) == 1);
  fs::remove_all(dir);
}
