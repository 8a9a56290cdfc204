#include "quadropt/emission.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "contract.hpp"
#include "quadropt/errors.hpp"
#include "quadropt/parallel.hpp"
#include "quadropt/quadrature.hpp"

namespace quadropt {

EmissionModel::EmissionModel(const SystemParams &params)
    : params_(params), dressed_(derive_dressed(params)), overlaps_(overlap_matrix(params)),
      omega_mech_(apply_damping_estimate(params)) {}

void EmissionModel::amplitudes_at(int n0, double delta, Eigen::VectorXcd &out, double t) const {
  const int nf = params_.n_fock;
  const int ns = params_.n_squeezed;
  const double scale = std::sqrt(params_.gamma_c / (2.0 * std::numbers::pi));
  const cplx half_gamma{0.0, 0.5 * params_.gamma_c};
  out.setZero(nf);
  for (int m = n0 % 2; m < nf; m += 2) {
    cplx sum = 0.0;
    const cplx shift = delta + static_cast<double>(m) * omega_mech_ + half_gamma;
    for (int n = n0 % 2; n < ns; n += 2) {
      const double w = overlaps_(m, n) * overlaps_(n0, n);
      if (w != 0.0) {
        const cplx z = shift - dressed_level(n);
        sum += (w / std::norm(z)) * std::conj(z);
      }
    }
    out[m] = scale * sum;
    if (t != 0.0)
      out[m] *= std::exp(cplx{0.0, -t} * (delta + static_cast<double>(m) * omega_mech_));
  }
}

cplx EmissionModel::amplitude(int n0, int m, double delta, double t) const {
  Eigen::VectorXcd v;
  amplitudes_at(n0, delta, v, t);
  return v[m];
}

double EmissionModel::spectrum_at(const MechState &initial, double delta) const {
  const auto idx = detail::active_indices(initial.rho);
  const Eigen::MatrixXcd rho_a = detail::restrict(initial.rho, idx);
  Eigen::MatrixXcd amps(static_cast<Eigen::Index>(idx.size()), params_.n_fock);
  Eigen::VectorXcd row;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    amplitudes_at(idx[i], delta, row);
    amps.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return detail::contract(rho_a, amps).real();
}

double EmissionModel::row_deficit(int n0) const {
  if (n0 >= params_.n_fock)
    return 1.0;
  return 1.0 - overlaps_.entries.row(n0).squaredNorm();
}

namespace {

// Probability bound lost to both basis cutoffs for population p[n0].
double truncated_weight(const EmissionModel &model, const std::vector<int> &idx,
                        const std::vector<double> &population) {
  const auto &ov = model.overlaps();
  double bound = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const int n0 = idx[i];
    double dropped = model.row_deficit(n0);
    for (int n = 0; n < ov.cols(); ++n)
      dropped += ov(n0, n) * ov(n0, n) * std::max(0.0, ov.column_deficit[n]);
    bound += population[i] * dropped;
  }
  return bound;
}

double uncovered_weight(const MechState &initial, const SystemParams &params,
                        const FrequencyGrid &grid) {
  double w = 0.0;
  for (const auto &line : resonance_lines(initial, params, params.n_fock))
    if (line.position < grid.min || line.position > grid.max)
      w += line.weight;
  return w;
}

std::string transition_label(int n, int m) {
  return "|1>_a|~" + std::to_string(n) + ">_b -> |0>_a|" + std::to_string(m) + ">_b";
}

} // namespace

EmissionAmplitude emission_amplitudes(int n0, const SystemParams &params,
                                      const FrequencyGrid &grid, double t) {
  params.validate();
  grid.validate();
  if (n0 < 0 || n0 >= params.n_fock)
    throw TruncationError("initial phonon index " + std::to_string(n0) + " not below n_fock",
                          1.0, n0 + 1);
  const EmissionModel model(params);
  EmissionAmplitude out;
  out.n0 = n0;
  out.grid = grid;
  out.truncated_weight = truncated_weight(model, {n0}, {1.0});
  if (out.truncated_weight > kTruncationTolerance)
    throw TruncationError("squeezed basis drops weight " + std::to_string(out.truncated_weight) +
                              " of |" + std::to_string(n0) + ">",
                          out.truncated_weight, params.n_fock + 10);

  MechState fock;
  fock.rho = Eigen::MatrixXcd::Zero(params.n_fock, params.n_fock);
  fock.rho(n0, n0) = 1.0;
  out.uncovered_weight = uncovered_weight(fock, params, grid);

  out.values.resize(params.n_fock, grid.points);
  parallel_for(static_cast<std::size_t>(grid.points), [&](std::size_t k) {
    Eigen::VectorXcd col;
    model.amplitudes_at(n0, grid.at(static_cast<int>(k)), col, t);
    out.values.col(static_cast<Eigen::Index>(k)) = col;
  });
  return out;
}

SpectralDensity emission_spectrum(const MechState &initial, const SystemParams &params,
                                  const FrequencyGrid &grid, double t) {
  params.validate();
  grid.validate();
  if (initial.dim() != params.n_fock)
    throw ParameterError("initial state dimension does not match n_fock");
  const EmissionModel model(params);

  const auto idx = detail::active_indices(initial.rho);
  const Eigen::MatrixXcd rho_a = detail::restrict(initial.rho, idx);
  std::vector<double> population(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    population[i] = initial.rho(idx[i], idx[i]).real();

  SpectralDensity out;
  out.grid = grid;
  out.truncated_weight = truncated_weight(model, idx, population);
  if (out.truncated_weight > kTruncationTolerance)
    throw TruncationError("basis cutoffs drop spectral weight " +
                              std::to_string(out.truncated_weight),
                          out.truncated_weight, params.n_fock + 10);
  out.uncovered_weight = uncovered_weight(initial, params, grid);

  auto point = [&](double delta, double time) {
    Eigen::MatrixXcd amps(static_cast<Eigen::Index>(idx.size()), params.n_fock);
    Eigen::VectorXcd row;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      model.amplitudes_at(idx[i], delta, row, time);
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

  std::vector<double> features;
  for (const auto &line : resonance_lines(initial, params, params.n_fock))
    if (line.weight > 1e-14)
      for (double k : {-2.0, 0.0, 2.0})
        features.push_back(line.position + k * params.gamma_c);
  const auto tail = integrate_outside(
      [&](double x, Eigen::VectorXcd &v) { v.resize(1); v[0] = point(x, 0.0).real(); }, 1,
      grid.min, grid.max, features, {1e-10, 1e-8, 100000});
  out.tail_correction = tail.value[0].real();
  return out;
}

std::vector<ResonanceLine> resonance_lines(const MechState &initial, const SystemParams &params,
                                           int max_order) {
  params.validate();
  const auto dressed = derive_dressed(params);
  const auto ov = overlap_matrix(params);
  const int n_max = std::min(max_order, params.n_squeezed);
  const int m_max = std::min(max_order, params.n_fock);

  std::vector<ResonanceLine> lines;
  for (int n = 0; n < n_max; ++n) {
    double pop = 0.0; // population of |~n>
    for (int n0 = 0; n0 < initial.dim(); ++n0)
      pop += initial.rho(n0, n0).real() * ov(n0, n) * ov(n0, n);
    if (pop <= 0.0)
      continue;
    for (int m = n % 2; m < m_max; m += 2) {
      const double w = pop * ov(m, n) * ov(m, n);
      if (w <= 0.0)
        continue;
      lines.push_back({n, m, dressed.delta1 + n * dressed.omega_m1 - m, w, transition_label(n, m)});
    }
  }
  std::sort(lines.begin(), lines.end(),
            [](const auto &a, const auto &b) { return a.position < b.position; });
  return lines;
}

std::vector<ResonanceLine> resonance_lines(Parity parity, const SystemParams &params,
                                           int max_order) {
  params.validate();
  const auto dressed = derive_dressed(params);
  const int first = parity == Parity::even ? 0 : 1;
  const int n_max = std::min(max_order, params.n_squeezed);
  const int m_max = std::min(max_order, params.n_fock);
  std::vector<ResonanceLine> lines;
  for (int n = first; n < n_max; n += 2)
    for (int m = first; m < m_max; m += 2) {
      const double w = overlap_element(m, n, dressed.eta1);
      lines.push_back(
          {n, m, dressed.delta1 + n * dressed.omega_m1 - m, w * w, transition_label(n, m)});
    }
  std::sort(lines.begin(), lines.end(),
            [](const auto &a, const auto &b) { return a.position < b.position; });
  return lines;
}

double sideband_ratio_estimate(const SystemParams &params) {
  return 1.0 + 8.0 * params.g0 * params.g0 / (params.gamma_c * params.gamma_c);
}

double sideband_ratio_exact(const SystemParams &params) {
  const EmissionModel model(params);
  const MechState ground = initial_state({StateKind::fock, 0.0}, params);
  const double delta = model.dressed().delta1 - 2.0;
  const double g = params.gamma_c;
  const double lorentz = g / (2.0 * std::numbers::pi) / (4.0 + 0.25 * g * g);
  return model.spectrum_at(ground, delta) / lorentz;
}

MechState emission_reduced_density(const MechState &initial, const SystemParams &params,
                                   double t) {
  params.validate();
  if (initial.dim() != params.n_fock)
    throw ParameterError("initial state dimension does not match n_fock");
  const EmissionModel model(params);
  const Eigen::MatrixXd &ov = model.overlaps().entries;
  const int nf = params.n_fock;
  const int ns = params.n_squeezed;
  const double gamma = params.gamma_c;
  const double omega1 = model.dressed().omega_m1;
  const cplx w = model.omega_mech();

  // Initial state in the dressed basis: W_{s s'} = sum_mn <~s|m> rho_mn <n|~s'>.
  const Eigen::MatrixXcd dressed_rho = ov.transpose().cast<cplx>() * initial.rho * ov.cast<cplx>();

  MechState out;
  out.kind = StateKind::reduced;
  out.rho = Eigen::MatrixXcd::Zero(nf, nf);
  parallel_for(static_cast<std::size_t>(nf), [&](std::size_t li) {
    const int l = static_cast<int>(li);
    for (int lp = 0; lp < nf; ++lp) {
      // Kernel denominator (l - l') omega_M + (s' - s) omega_m1 + i gamma_c,
      // with l omega_M - l' omega_M^* when omega_M carries a damping part.
      const cplx base = static_cast<double>(l) * w - static_cast<double>(lp) * std::conj(w) +
                        cplx{0.0, gamma};
      cplx sum = 0.0;
      for (int s = 0; s < ns; ++s) {
        const double a = ov(l, s);
        if (a == 0.0)
          continue;
        for (int sp = 0; sp < ns; ++sp) {
          const double b = ov(lp, sp);
          if (b == 0.0 || dressed_rho(s, sp) == 0.0)
            continue;
          sum += a * b * dressed_rho(s, sp) / (base + (sp - s) * omega1);
        }
      }
      cplx value = cplx{0.0, gamma} * sum;
      if (t != 0.0)
        value *= std::exp(cplx{0.0, -t} *
                          (static_cast<double>(l) * w - static_cast<double>(lp) * std::conj(w)));
      out.rho(l, lp) = value;
    }
  });

  out.hermiticity_residual = (out.rho - out.rho.adjoint()).cwiseAbs().maxCoeff();
  out.trace_deficit = 1.0 - out.rho.trace().real();
  if (!params.damping && std::abs(out.trace_deficit) > kTruncationTolerance)
    throw TruncationError("reduced density trace deviates from 1 by " +
                              std::to_string(out.trace_deficit),
                          std::abs(out.trace_deficit), params.n_fock + 10);
  return out;
}

double linear_entropy(const Eigen::MatrixXcd &rho) { return 1.0 - rho.cwiseAbs2().sum(); }

double linear_entropy(const MechState &rho) { return linear_entropy(rho.rho); }

double emission_entropy(const MechState &initial, const SystemParams &params) {
  if (!initial.is_pure(1e-6))
    throw ParameterError("linear entropy is only reported for pure initial states (" +
                         initial.label() + " is mixed)");
  return linear_entropy(emission_reduced_density(initial, params));
}

} // namespace quadropt
