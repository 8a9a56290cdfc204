#include "quadropt/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "contract.hpp"
#include "quadropt/errors.hpp"
#include "quadropt/parallel.hpp"

namespace quadropt {

void WavePacket::validate() const {
  if (!std::isfinite(delta0))
    throw ParameterError("packet centre delta0 must be finite");
  if (!std::isfinite(epsilon) || !(epsilon > 0.0))
    throw ParameterError("packet width epsilon must be positive");
}

cplx WavePacket::amplitude(double delta) const {
  return std::sqrt(epsilon / std::numbers::pi) / cplx{delta - delta0, epsilon};
}

ScatteringModel::ScatteringModel(const SystemParams &params, const WavePacket &packet)
    : emission_(params), packet_(packet) {
  packet_.validate();
}

void ScatteringModel::amplitudes_at(int n0, double delta, Eigen::VectorXcd &direct,
                                    Eigen::VectorXcd &cavity, double t) const {
  const auto &p = emission_.params();
  const cplx w = emission_.omega_mech();
  emission_.amplitudes_at(n0, delta, cavity);
  // cavity_m = -L(delta - (n0 - m) omega_M) * i gamma * sum_n <m|~n><~n|n0>/(...);
  // the emission amplitude already carries sqrt(gamma/2pi) times that sum.
  const cplx factor = cplx{0.0, -std::sqrt(2.0 * std::numbers::pi * p.gamma_c)} *
                      std::sqrt(packet_.epsilon / std::numbers::pi);
  for (int m = 0; m < p.n_fock; ++m) {
    if (cavity[m] == 0.0)
      continue;
    const cplx centre = packet_.delta0 + static_cast<double>(n0 - m) * w;
    cavity[m] *= factor / (delta - centre + cplx{0.0, packet_.epsilon});
  }
  direct.setZero(p.n_fock);
  direct[n0] = packet_.amplitude(delta);
  if (t != 0.0) {
    for (int m = 0; m < p.n_fock; ++m) {
      const cplx phase = std::exp(cplx{0.0, -t} * (delta + static_cast<double>(m) * w));
      direct[m] *= phase;
      cavity[m] *= phase;
    }
  }
}

void ScatteringModel::total_at(int n0, double delta, Eigen::VectorXcd &out, double t) const {
  Eigen::VectorXcd direct;
  amplitudes_at(n0, delta, direct, out, t);
  out += direct;
}

std::vector<double> ScatteringModel::features(const std::vector<int> &initial_indices) const {
  const auto &p = emission_.params();
  const auto &ov = emission_.overlaps();
  const double eps = packet_.epsilon;
  const double gamma = p.gamma_c;
  std::vector<double> x;
  auto add = [&x](double c, double width) {
    for (double k : {-3.0, 0.0, 3.0})
      x.push_back(c + k * width);
  };
  for (int n0 : initial_indices) {
    for (int m = n0 % 2; m < p.n_fock; m += 2) {
      const double centre = packet_.delta0 + (n0 - m);
      double channel = m == n0 ? 1.0 : 0.0;
      for (int n = n0 % 2; n < p.n_squeezed; n += 2) {
        // Rough probability carried by the cavity pole: peak |amplitude|^2
        // times its width.
        const double pole = emission_.dressed_level(n) - m;
        const double peak = 2.0 * std::abs(ov(m, n) * ov(n0, n)) * std::sqrt(eps / std::numbers::pi) /
                            std::hypot(pole - centre, eps);
        const double weight = peak * peak * gamma;
        channel = std::max(channel, weight);
        if (weight > 1e-12)
          add(pole, gamma);
      }
      if (channel > 1e-12)
        add(centre, eps);
    }
  }
  std::sort(x.begin(), x.end());
  std::vector<double> merged;
  const double min_gap = 1e-3 * std::min(eps, gamma);
  for (double v : x)
    if (merged.empty() || v - merged.back() > min_gap)
      merged.push_back(v);
  return merged;
}

namespace {

double scattering_truncated_weight(const EmissionModel &model, const std::vector<int> &idx,
                                   const Eigen::MatrixXcd &rho) {
  const auto &ov = model.overlaps();
  double bound = 0.0;
  for (int n0 : idx) {
    double dropped = model.row_deficit(n0);
    for (int n = 0; n < ov.cols(); ++n)
      dropped += ov(n0, n) * ov(n0, n) * std::max(0.0, ov.column_deficit[n]);
    bound += rho(n0, n0).real() * dropped;
  }
  return bound;
}

} // namespace

ScatterAmplitude scattering_amplitudes(int n0, const WavePacket &packet,
                                       const SystemParams &params, const FrequencyGrid &grid,
                                       double t) {
  params.validate();
  grid.validate();
  if (n0 < 0 || n0 >= params.n_fock)
    throw TruncationError("initial phonon index " + std::to_string(n0) + " not below n_fock",
                          1.0, n0 + 1);
  const ScatteringModel model(params, packet);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(params.n_fock, params.n_fock);
  rho(n0, n0) = 1.0;

  ScatterAmplitude out;
  out.n0 = n0;
  out.grid = grid;
  out.truncated_weight = scattering_truncated_weight(model.emission(), {n0}, rho);
  if (out.truncated_weight > kTruncationTolerance)
    throw TruncationError("squeezed basis drops weight " + std::to_string(out.truncated_weight),
                          out.truncated_weight, params.n_fock + 10);

  out.direct.resize(params.n_fock, grid.points);
  out.cavity.resize(params.n_fock, grid.points);
  parallel_for(static_cast<std::size_t>(grid.points), [&](std::size_t k) {
    Eigen::VectorXcd d, c;
    model.amplitudes_at(n0, grid.at(static_cast<int>(k)), d, c, t);
    out.direct.col(static_cast<Eigen::Index>(k)) = d;
    out.cavity.col(static_cast<Eigen::Index>(k)) = c;
  });
  return out;
}

SpectralDensity scattering_spectrum(const MechState &initial, const WavePacket &packet,
                                    const SystemParams &params, const FrequencyGrid &grid,
                                    double t) {
  params.validate();
  grid.validate();
  if (initial.dim() != params.n_fock)
    throw ParameterError("initial state dimension does not match n_fock");
  const ScatteringModel model(params, packet);
  const auto idx = detail::active_indices(initial.rho);
  const Eigen::MatrixXcd rho_a = detail::restrict(initial.rho, idx);

  SpectralDensity out;
  out.grid = grid;
  out.truncated_weight = scattering_truncated_weight(model.emission(), idx, initial.rho);
  if (out.truncated_weight > kTruncationTolerance)
    throw TruncationError("basis cutoffs drop spectral weight " +
                              std::to_string(out.truncated_weight),
                          out.truncated_weight, params.n_fock + 10);

  auto point = [&](double delta, double time) {
    Eigen::MatrixXcd amps(static_cast<Eigen::Index>(idx.size()), params.n_fock);
    Eigen::VectorXcd row;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      model.total_at(idx[i], delta, row, time);
      amps.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return detail::contract(rho_a, amps);
  };

  out.values.assign(grid.points, 0.0);
  std::vector<double> imag(grid.points, 0.0);
  parallel_for(static_cast<std::size_t>(grid.points), [&](std::size_t k) {
    const cplx s = point(grid.at(static_cast<int>(k)), t);
    out.values[k] = s.real();
    imag[k] = std::abs(s.imag());
  });
  out.max_imag = *std::max_element(imag.begin(), imag.end());
  out.norm = trapezoid(grid, out.values);
  const auto tail = integrate_outside(
      [&](double x, Eigen::VectorXcd &v) { v.resize(1); v[0] = point(x, 0.0).real(); }, 1,
      grid.min, grid.max, model.features(idx), {1e-10, 1e-8, 100000});
  out.tail_correction = tail.value[0].real();
  return out;
}

std::vector<ResonancePair> scattering_resonances(int n0, const SystemParams &params,
                                                 int max_order) {
  params.validate();
  const auto d = derive_dressed(params);
  const int n_max = std::min(max_order, params.n_squeezed);
  const int m_max = std::min(max_order, params.n_fock);
  std::vector<ResonancePair> out;
  for (int n = n0 % 2; n < n_max; n += 2) {
    const double level = d.delta1 + n * d.omega_m1;
    for (int m = n0 % 2; m < m_max; m += 2)
      out.push_back({n0, n, m, level - n0, level - m});
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.injection != b.injection ? a.injection < b.injection : a.emission < b.emission;
  });
  return out;
}

ScatterDensity scattering_reduced_density_detailed(const MechState &initial,
                                                   const WavePacket &packet,
                                                   const SystemParams &params,
                                                   const QuadratureOptions &options) {
  params.validate();
  if (initial.dim() != params.n_fock)
    throw ParameterError("initial state dimension does not match n_fock");
  const ScatteringModel model(params, packet);
  const int nf = params.n_fock;
  const auto idx = detail::active_indices(initial.rho);
  const Eigen::MatrixXcd rho_a = detail::restrict(initial.rho, idx);

  const double dropped = scattering_truncated_weight(model.emission(), idx, initial.rho);
  if (dropped > kTruncationTolerance)
    throw TruncationError("basis cutoffs drop weight " + std::to_string(dropped), dropped,
                          params.n_fock + 10);

  const auto na = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd amps(na, nf), weighted(na, nf);
  Eigen::VectorXcd row;
  const VectorIntegrand integrand = [&](double x, Eigen::VectorXcd &out) {
    for (Eigen::Index i = 0; i < na; ++i) {
      model.total_at(idx[i], x, row);
      amps.row(i) = row.transpose();
    }
    weighted.noalias() = rho_a * amps.conjugate();
    out.resize(static_cast<Eigen::Index>(nf) * nf);
    Eigen::Map<Eigen::MatrixXcd>(out.data(), nf, nf).noalias() = amps.transpose() * weighted;
  };

  const auto result = integrate_real_line(integrand, nf * nf, model.features(idx), options);
  if (!result.converged)
    throw ConvergenceError("reduced-density quadrature stopped at error " +
                               std::to_string(result.error),
                           result.error);

  ScatterDensity out;
  out.quadrature_error = result.error;
  out.evaluations = result.evaluations;
  out.state.kind = StateKind::reduced;
  out.state.rho = Eigen::Map<const Eigen::MatrixXcd>(result.value.data(), nf, nf);
  out.state.hermiticity_residual = (out.state.rho - out.state.rho.adjoint()).cwiseAbs().maxCoeff();
  out.state.trace_deficit = 1.0 - out.state.rho.trace().real();
  if (!params.damping && std::abs(out.state.trace_deficit) > kTruncationTolerance)
    throw TruncationError("scattered reduced density trace deviates from 1 by " +
                              std::to_string(out.state.trace_deficit),
                          std::abs(out.state.trace_deficit), params.n_fock + 10);
  return out;
}

MechState scattering_reduced_density(const MechState &initial, const WavePacket &packet,
                                     const SystemParams &params,
                                     const QuadratureOptions &options) {
  return scattering_reduced_density_detailed(initial, packet, params, options).state;
}

std::vector<double> scattering_entropy_profile(const MechState &initial,
                                               const SystemParams &params,
                                               std::span<const double> delta0s, double epsilon,
                                               const QuadratureOptions &options) {
  if (!initial.is_pure(1e-6))
    throw ParameterError("linear entropy is only reported for pure initial states (" +
                         initial.label() + " is mixed)");
  std::vector<double> out(delta0s.size());
  parallel_for(delta0s.size(), [&](std::size_t i) {
    const WavePacket packet{delta0s[i], epsilon};
    out[i] = linear_entropy(scattering_reduced_density(initial, packet, params, options));
  });
  return out;
}

} // namespace quadropt
