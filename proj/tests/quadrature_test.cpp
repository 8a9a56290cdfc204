#include <doctest.h>

#include <cmath>
#include <numbers>

#include "quadropt/errors.hpp"
#include "quadropt/quadrature.hpp"
#include "quadropt/spectrum.hpp"

using namespace quadropt;

namespace {

VectorIntegrand lorentzian(double centre, double width) {
  return [=](double x, Eigen::VectorXcd &out) {
    out.resize(1);
    out[0] = width / std::numbers::pi / ((x - centre) * (x - centre) + width * width);
  };
}

} // namespace

TEST_CASE("Lorentzian over the real line integrates to one") {
  for (double w : {0.01, 0.2, 3.0}) {
    const auto r = integrate_real_line(lorentzian(0.7, w), 1, {0.7 - w, 0.7, 0.7 + w});
    CHECK(r.converged);
    CHECK(r.value[0].real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.error < 1e-8);
  }
}

TEST_CASE("vector integrand components are integrated together") {
  const VectorIntegrand f = [](double x, Eigen::VectorXcd &out) {
    out.resize(3);
    const double g = std::exp(-x * x);
    out << g, cplx(0.0, x * x * g), cplx(1.0 / (1.0 + x * x), 0.0);
  };
  const auto r = integrate_real_line(f, 3, {-1.0, 1.0});
  const double rpi = std::sqrt(std::numbers::pi);
  CHECK(r.value[0].real() == doctest::Approx(rpi).epsilon(1e-10));
  CHECK(r.value[1].imag() == doctest::Approx(rpi / 2).epsilon(1e-10));
  CHECK(r.value[2].real() == doctest::Approx(std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("finite interval") {
  const VectorIntegrand f = [](double x, Eigen::VectorXcd &out) {
    out.resize(1);
    out[0] = std::sin(x);
  };
  const auto r = integrate_interval(f, 1, 0.0, std::numbers::pi);
  CHECK(r.value[0].real() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("outside and inside pieces add up to the whole line") {
  const auto f = lorentzian(0.3, 0.05);
  const double lo = -1.0, hi = 2.0;
  const auto inner = integrate_interval(f, 1, lo, hi, {1e-12, 1e-12, 200000});
  const auto outer = integrate_outside(f, 1, lo, hi, {-5.0, 0.3, 7.0});
  const double exact_inner = (std::atan((hi - 0.3) / 0.05) - std::atan((lo - 0.3) / 0.05)) /
                             std::numbers::pi;
  CHECK(inner.value[0].real() == doctest::Approx(exact_inner).epsilon(1e-10));
  CHECK(outer.value[0].real() == doctest::Approx(1.0 - exact_inner).epsilon(1e-8));
  CHECK_THROWS_AS(integrate_outside(f, 1, 1.0, 1.0, {}), ParameterError);
}

TEST_CASE("panel budget exhaustion is reported") {
  const auto f = lorentzian(0.0, 1e-7);
  QuadratureOptions opts;
  opts.max_panels = 4;
  const auto r = integrate_real_line(f, 1, {-10.0, 10.0}, opts);
  CHECK_FALSE(r.converged);
}

TEST_CASE("trapezoid on a uniform grid") {
  FrequencyGrid g{0.0, 1.0, 101};
  std::vector<double> y(101);
  for (int i = 0; i < 101; ++i)
    y[i] = g.at(i);
  CHECK(trapezoid(g, y) == doctest::Approx(0.5));
}

TEST_CASE("peak prominence") {
  // Two bumps of heights 1 and 0.3 on a 0.05 baseline.
  FrequencyGrid g{0.0, 10.0, 1001};
  std::vector<double> y(g.points);
  for (int i = 0; i < g.points; ++i) {
    const double x = g.at(i);
    y[i] = 0.05 + std::exp(-(x - 3) * (x - 3) * 4) + 0.3 * std::exp(-(x - 6) * (x - 6) * 4);
  }
  const auto peaks = find_peaks(g, y);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].position == doctest::Approx(3.0).epsilon(0.01));
  CHECK(peaks[0].prominence == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(peaks[1].position == doctest::Approx(6.0).epsilon(0.01));
  CHECK(peaks[1].prominence == doctest::Approx(0.3).epsilon(1e-3));

  CHECK(prominent_peaks(g, y, 0.05).size() == 2);
  CHECK(prominent_peaks(g, y, 0.5).size() == 1);
}

TEST_CASE("flat tops count once") {
  FrequencyGrid g{0.0, 6.0, 7};
  const std::vector<double> y{0, 1, 2, 2, 2, 1, 0};
  const auto peaks = find_peaks(g, y);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].height == 2.0);
  CHECK(peaks[0].prominence == 2.0);
}
