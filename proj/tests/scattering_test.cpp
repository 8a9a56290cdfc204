#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadropt/errors.hpp"
#include "quadropt/scattering.hpp"

using namespace quadropt;

namespace {

SystemParams params(double g0, double gamma_c) {
  SystemParams p;
  p.g0 = g0;
  p.gamma_c = gamma_c;
  return p;
}

MechState fock(int n, const SystemParams &p) {
  return initial_state({StateKind::fock, double(n)}, p);
}

double value_near(const FrequencyGrid &g, const std::vector<double> &y, double x) {
  const int i = static_cast<int>(std::lround((x - g.min) / g.step()));
  return y[std::clamp(i, 0, g.points - 1)];
}

} // namespace

TEST_CASE("packet validation") {
  CHECK_THROWS_AS((WavePacket{0.0, 0.0}.validate()), ParameterError);
  CHECK_THROWS_AS((WavePacket{NAN, 0.1}.validate()), ParameterError);
  const WavePacket w{0.3, 0.1};
  CHECK(std::abs(w.amplitude(0.3)) == doctest::Approx(std::sqrt(0.1 / std::numbers::pi) / 0.1));
}

TEST_CASE("uncoupled cavity only adds a phase") {
  const auto p = params(0.0, 0.2);
  const WavePacket w{0.1, 0.05};
  ScatteringModel model(p, w);
  Eigen::VectorXcd out;
  for (double d : {-0.7, 0.0, 0.1, 0.4}) {
    model.total_at(0, d, out);
    const cplx expected = w.amplitude(d) * cplx(d, -0.1) / cplx(d, 0.1);
    CHECK(std::abs(out[0] - expected) < 1e-13);
    CHECK(out.tail(out.size() - 1).cwiseAbs().maxCoeff() < 1e-15);
  }
  const FrequencyGrid grid{-2, 2, 801};
  const auto s = scattering_spectrum(fock(0, p), w, p, grid);
  for (int k = 0; k < grid.points; ++k)
    CHECK(s.values[k] == doctest::Approx(std::norm(w.amplitude(grid.at(k)))).epsilon(1e-10));
}

TEST_CASE("parity and the shifted direct channel") {
  const auto p = params(0.8, 0.2);
  const WavePacket w{0.5, 0.02};
  const auto amp = scattering_amplitudes(0, w, p, FrequencyGrid{-3, 5, 161});
  for (int m = 1; m < amp.cavity.rows(); m += 2)
    CHECK(amp.cavity.row(m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(amp.direct.bottomRows(amp.direct.rows() - 1).cwiseAbs().maxCoeff() == 0.0);

  // The m = 2 channel carries the packet shifted down by one phonon pair.
  ScatteringModel model(p, w);
  Eigen::VectorXcd direct, cavity;
  double best = -1, where = 0;
  for (double d = -3.0; d < 0.0; d += 0.001) {
    model.amplitudes_at(0, d, direct, cavity);
    if (std::abs(cavity[2]) > best) {
      best = std::abs(cavity[2]);
      where = d;
    }
  }
  CHECK(where == doctest::Approx(0.5 - 2.0).epsilon(0.01));
}

TEST_CASE("broad packet on the dressed line: dip and sideband") {
  const auto p = params(0.8, 0.2);
  const auto d = derive_dressed(p);
  const FrequencyGrid grid{-6, 8, 4001};
  const auto s = scattering_spectrum(fock(0, p), WavePacket{d.delta1, 1.2}, p, grid);
  CHECK(s.total() == doctest::Approx(1.0).epsilon(1e-4));

  int lo = 0;
  for (int k = 0; k < grid.points; ++k)
    if (std::abs(grid.at(k) - d.delta1) < 0.3 &&
        (lo == 0 || s.values[k] < s.values[lo]))
      lo = k;
  CHECK(std::abs(grid.at(lo) - d.delta1) < 0.01);

  bool sideband = false;
  for (const auto &pk : find_peaks(grid, s.values))
    if (std::abs(pk.position - (d.delta1 - 2)) < 0.02)
      sideband = true;
  CHECK(sideband);
}

TEST_CASE("narrow packet on the n = 2 line produces a comb") {
  const auto p = params(0.8, 0.2);
  const auto d = derive_dressed(p);
  const double delta0 = d.delta1 + 2 * d.omega_m1;
  const FrequencyGrid grid{-6, 8, 4001};
  const auto s = scattering_spectrum(fock(0, p), WavePacket{delta0, 0.02}, p, grid);
  const auto peaks = prominent_peaks(grid, s.values, 0.01);
  REQUIRE(peaks.size() >= 4);
  CHECK(std::abs(peaks[0].position - delta0) < 0.01);
  std::vector<double> pos;
  for (int i = 0; i < 4; ++i)
    pos.push_back(peaks[i].position);
  std::sort(pos.begin(), pos.end());
  for (int i = 1; i < 4; ++i)
    CHECK(pos[i] - pos[i - 1] == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("resonance pairs") {
  const auto p = params(0.8, 0.2);
  const auto pairs = scattering_resonances(0, p, 6);
  auto has_injection = [&](double x) {
    return std::any_of(pairs.begin(), pairs.end(),
                       [&](const ResonancePair &r) { return std::abs(r.injection - x) < 1e-3; });
  };
  CHECK(has_injection(0.5248));
  CHECK(has_injection(4.6240));
  for (const auto &r : pairs) {
    CHECK(r.n % 2 == r.n0 % 2);
    CHECK(r.m % 2 == r.n % 2);
    CHECK(r.emission - r.injection == doctest::Approx(r.n0 - r.m));
  }
}

TEST_CASE("coherent state: only even-parity lines are lit") {
  const auto p = params(0.8, 0.2);
  const auto d = derive_dressed(p);
  const FrequencyGrid grid{-6, 8, 4001};
  const auto initial = initial_state({StateKind::coherent, 1.0}, p);
  const auto s = scattering_spectrum(initial, WavePacket{d.delta1, 0.02}, p, grid);
  const double top = s.max_value();
  CHECK(std::abs(prominent_peaks(grid, s.values, 0.05).front().position - d.delta1) < 0.01);
  for (int n = 1; n < 6; n += 2)
    for (int m = 1; m < 6; m += 2) {
      const double x = d.delta1 + n * d.omega_m1 - m;
      if (x > grid.min && x < grid.max)
        CHECK(value_near(grid, s.values, x) < 0.05 * top);
    }
}

TEST_CASE("direct and cavity parts interfere to conserve probability") {
  // 2 Re int conj(direct) cavity + int |cavity|^2 = 0 summed over channels.
  for (double g0 : {0.3, 0.8})
    for (double eps : {0.02, 1.2}) {
      const auto p = params(g0, 0.2);
      const WavePacket w{derive_dressed(p).delta1, eps};
      ScatteringModel model(p, w);
      const VectorIntegrand f = [&](double x, Eigen::VectorXcd &out) {
        Eigen::VectorXcd direct, cavity;
        model.amplitudes_at(0, x, direct, cavity);
        out.resize(1);
        out[0] = 2.0 * std::real(std::conj(direct[0]) * cavity[0]) + cavity.squaredNorm();
      };
      const auto r = integrate_real_line(f, 1, model.features({0}), {1e-10, 1e-9, 200000});
      CHECK(std::abs(r.value[0]) < 1e-6);
    }
}

TEST_CASE("unitarity across the parameter lattice") {
  for (double g0 : {0.1, 0.8, 2.0})
    for (double gamma_c : {0.2, 1.5})
      for (double eps : {0.02, 1.2}) {
        const auto p = params(g0, gamma_c);
        const WavePacket w{derive_dressed(p).delta1, eps};
        const auto s = scattering_spectrum(fock(0, p), w, p, FrequencyGrid{});
        CAPTURE(g0);
        CAPTURE(gamma_c);
        CAPTURE(eps);
        CHECK(s.total() == doctest::Approx(1.0).epsilon(1e-3));
      }
}

TEST_CASE("reduced density after scattering") {
  SUBCASE("uncoupled") {
    const auto p = params(0.0, 0.2);
    const auto rho = scattering_reduced_density(fock(1, p), WavePacket{0.0, 0.05}, p);
    CHECK(std::abs(rho.rho(1, 1) - 1.0) < 1e-6);
    CHECK(linear_entropy(rho) < 1e-6);
  }
  SUBCASE("coupled") {
    const auto p = params(0.8, 0.2);
    const auto rho =
        scattering_reduced_density(fock(0, p), WavePacket{derive_dressed(p).delta1, 0.02}, p);
    CHECK(std::abs(rho.rho.trace() - 1.0) < 1e-6);
    CHECK((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
    CHECK(linear_entropy(rho) > 0.0);
  }
}

TEST_CASE("entropy profile peaks on injection lines") {
  const auto p = params(0.8, 0.2);
  const auto d = derive_dressed(p);
  std::vector<double> delta0s;
  for (int i = 0; i <= 70; ++i)
    delta0s.push_back(-1.0 + 0.1 * i);
  const auto e = scattering_entropy_profile(fock(0, p), p, delta0s, 0.02);
  auto near_max = [&](double x) {
    const int i = static_cast<int>(std::lround((x + 1.0) / 0.1));
    for (int j = std::max(1, i - 1); j <= std::min(69, i + 1); ++j)
      if (e[j] > e[j - 1] && e[j] >= e[j + 1])
        return true;
    return false;
  };
  CHECK(near_max(d.delta1));
  CHECK(near_max(d.delta1 + 2 * d.omega_m1));
  CHECK_THROWS_AS(
      scattering_entropy_profile(initial_state({StateKind::thermal, 0.5}, p), p, delta0s, 0.02),
      ParameterError);
}

TEST_CASE("resonant entropy grows with coupling") {
  for (int n0 : {0, 1, 2}) {
    double last = -1.0;
    for (double g0 = 0.1; g0 <= 1.0001; g0 += 0.15) {
      const auto p = params(g0, 0.2);
      const auto d = derive_dressed(p);
      const double delta0 = d.delta1 + n0 * d.omega_m1 - n0;
      const double e = scattering_entropy_profile(fock(n0, p), p, std::vector{delta0}, 0.02)[0];
      CAPTURE(n0);
      CAPTURE(g0);
      CHECK(e > last);
      last = e;
    }
  }
}
