#include <doctest.h>

#include <cmath>
#include <random>

#include "quadropt/scattering.hpp"

using namespace quadropt;

namespace {

struct Sampler {
  std::mt19937 rng{20240611};
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

  SystemParams params() {
    SystemParams p;
    p.g0 = uniform(-0.2, 1.2);
    p.gamma_c = uniform(0.05, 1.5);
    return p;
  }
  StateSpec pure_state() {
    if (integer(0, 1))
      return {StateKind::fock, double(integer(0, 3))};
    return {StateKind::coherent, uniform(0.1, 1.2)};
  }
};

const FrequencyGrid kGrid{-6, 8, 1401};

} // namespace

TEST_CASE("amplitudes obey phonon parity") {
  Sampler s;
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = s.params();
    const int n0 = s.integer(0, 5);
    const WavePacket w{s.uniform(-1, 3), s.uniform(0.01, 1.5)};
    EmissionModel em(p);
    ScatteringModel sm(p, w);
    Eigen::VectorXcd a, direct, cavity;
    const double d = s.uniform(-4, 6);
    em.amplitudes_at(n0, d, a);
    sm.amplitudes_at(n0, d, direct, cavity);
    for (int m = 0; m < p.n_fock; ++m)
      if ((m + n0) % 2) {
        CHECK(a[m] == cplx(0.0));
        CHECK(cavity[m] == cplx(0.0));
        CHECK(direct[m] == cplx(0.0));
      }
  }
}

TEST_CASE("spectra are non-negative and time independent") {
  Sampler s;
  for (int trial = 0; trial < 12; ++trial) {
    const auto p = s.params();
    const auto initial = initial_state(s.pure_state(), p);
    const double t = s.uniform(0.5, 50);
    const auto e0 = emission_spectrum(initial, p, kGrid);
    const auto et = emission_spectrum(initial, p, kGrid, t);
    const WavePacket w{derive_dressed(p).delta1, s.uniform(0.02, 1.2)};
    const auto s0 = scattering_spectrum(initial, w, p, kGrid);
    const auto st = scattering_spectrum(initial, w, p, kGrid, t);
    const double scale = std::max(e0.max_value(), s0.max_value());
    for (int k = 0; k < kGrid.points; ++k) {
      CHECK(e0.values[k] >= -1e-13 * scale);
      CHECK(s0.values[k] >= -1e-13 * scale);
      CHECK(std::abs(e0.values[k] - et.values[k]) <= 1e-10 * scale);
      CHECK(std::abs(s0.values[k] - st.values[k]) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("emitted reduced state has unit trace and a time independent entropy") {
  Sampler s;
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = s.params();
    const auto initial = initial_state(s.pure_state(), p);
    const auto rho0 = emission_reduced_density(initial, p);
    const auto rhot = emission_reduced_density(initial, p, s.uniform(1, 30));
    CHECK(std::abs(rho0.rho.trace() - 1.0) < 1e-6);
    CHECK((rho0.rho - rho0.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(linear_entropy(rho0) == doctest::Approx(linear_entropy(rhot)).epsilon(1e-9));
    CHECK(linear_entropy(rho0) >= -1e-12);
    CHECK(linear_entropy(rho0) <= 1.0);
  }
}

TEST_CASE("spectra are continuous as the coupling vanishes") {
  Sampler s;
  for (int trial = 0; trial < 6; ++trial) {
    SystemParams p0;
    p0.gamma_c = s.uniform(0.05, 1.5);
    auto p1 = p0;
    p1.g0 = 1e-7;
    const auto initial = initial_state(s.pure_state(), p0);
    const auto a = emission_spectrum(initial, p0, kGrid);
    const auto b = emission_spectrum(initial, p1, kGrid);
    const WavePacket w{s.uniform(-1, 2), s.uniform(0.02, 1.2)};
    const auto c = scattering_spectrum(initial, w, p0, kGrid);
    const auto d = scattering_spectrum(initial, w, p1, kGrid);
    for (int k = 0; k < kGrid.points; ++k) {
      CHECK(std::abs(a.values[k] - b.values[k]) <= 1e-4 * a.max_value());
      CHECK(std::abs(c.values[k] - d.values[k]) <= 1e-4 * c.max_value());
    }
  }
}

TEST_CASE("direct and cavity terms conserve probability") {
  Sampler s;
  for (int trial = 0; trial < 8; ++trial) {
    const auto p = s.params();
    const int n0 = s.integer(0, 2);
    const WavePacket w{s.uniform(-1, 4), s.uniform(0.02, 1.2)};
    ScatteringModel model(p, w);
    const VectorIntegrand f = [&](double x, Eigen::VectorXcd &out) {
      Eigen::VectorXcd direct, cavity;
      model.amplitudes_at(n0, x, direct, cavity);
      out.resize(1);
      out[0] = 2.0 * std::real(direct.dot(cavity)) + cavity.squaredNorm();
    };
    const auto r = integrate_real_line(f, 1, model.features({n0}), {1e-10, 1e-9, 400000});
    CAPTURE(p.g0);
    CAPTURE(p.gamma_c);
    CAPTURE(w.delta0);
    CAPTURE(w.epsilon);
    CHECK(std::abs(r.value[0]) < 1e-6);
  }
}
