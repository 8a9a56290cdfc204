#include "quadropt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadropt/errors.hpp"

namespace quadropt::oracle {

int ContinuumGrid::k_count() const { return 2 * static_cast<int>(std::lround(span / spacing)) + 1; }

double ContinuumGrid::coupling(double gamma_c) const {
  return std::sqrt(gamma_c / (2.0 * std::numbers::pi)) * std::sqrt(spacing);
}

FrequencyGrid ContinuumGrid::frequency_grid() const {
  const int n = k_count();
  return {delta(0), delta(n - 1), n};
}

void ContinuumGrid::validate(const SystemParams &params, double t_final, double epsilon) const {
  if (!(span > 0.0) || !(spacing > 0.0))
    throw ConfigError("continuum grid needs positive span and spacing");
  const double widest = std::max(params.gamma_c, epsilon);
  if (span < 10.0 * widest)
    throw ConfigError("continuum span " + std::to_string(span) + " below 10 x max(gamma_c, epsilon)");
  if (spacing > params.gamma_c / 20.0)
    throw ConfigError("mode spacing " + std::to_string(spacing) + " exceeds gamma_c / 20");
  if (2.0 * std::numbers::pi / spacing < 4.0 * t_final)
    throw ConfigError("recurrence time 2 pi / spacing shorter than 4 t_final");
}

AmplitudeField emission_start(int n0, const SystemParams &params, const ContinuumGrid &grid) {
  params.validate();
  if (n0 < 0 || n0 >= params.n_fock)
    throw ParameterError("initial phonon index out of range");
  const auto ov = overlap_matrix(params);
  AmplitudeField f;
  f.a_amp = ov.entries.row(n0).transpose().cast<cplx>();
  f.b_amp = Eigen::MatrixXcd::Zero(params.n_fock, grid.k_count());
  return f;
}

AmplitudeField scattering_start(int n0, const WavePacket &packet, const SystemParams &params,
                                const ContinuumGrid &grid, double lead_time) {
  params.validate();
  packet.validate();
  if (n0 < 0 || n0 >= params.n_fock)
    throw ParameterError("initial phonon index out of range");
  if (!(lead_time >= 0.0))
    throw ConfigError("lead time must be non-negative");
  AmplitudeField f;
  f.a_amp = Eigen::VectorXcd::Zero(params.n_squeezed);
  f.b_amp = Eigen::MatrixXcd::Zero(params.n_fock, grid.k_count());
  f.time = -lead_time;
  const double root_dk = std::sqrt(grid.spacing);
  for (int k = 0; k < grid.k_count(); ++k) {
    const cplx back = std::exp(cplx{0.0, lead_time * (grid.delta(k) + n0)});
    f.b_amp(n0, k) = packet.amplitude(grid.delta(k)) * root_dk * back;
  }
  return f;
}

AmplitudeField integrate_amplitudes(const AmplitudeField &initial, const SystemParams &params,
                                    const ContinuumGrid &grid, double t_final,
                                    const IntegratorOptions &options) {
  params.validate();
  const int nf = params.n_fock;
  const int ns = params.n_squeezed;
  const int nk = grid.k_count();
  if (initial.a_amp.size() != ns || initial.b_amp.rows() != nf || initial.b_amp.cols() != nk)
    throw ConfigError("amplitude field shape does not match parameters and grid");
  if (!(options.dt > 0.0))
    throw ConfigError("time step must be positive");

  const auto dressed = derive_dressed(params);
  const Eigen::MatrixXcd ov = overlap_matrix(params).entries.cast<cplx>();
  const double v = grid.coupling(params.gamma_c);
  const cplx minus_iv{0.0, -v};

  const int steps = std::max(1, static_cast<int>(std::ceil((t_final - initial.time) / options.dt)));
  const double h = (t_final - initial.time) / steps;

  // Free rotation over half a step.
  Eigen::VectorXcd ea(ns), ea2(ns);
  for (int n = 0; n < ns; ++n) {
    ea[n] = std::exp(cplx{0.0, -0.5 * h * (dressed.delta1 + n * dressed.omega_m1)});
    ea2[n] = ea[n] * ea[n];
  }
  Eigen::VectorXcd q(nf), q2(nf);
  for (int m = 0; m < nf; ++m) {
    q[m] = std::exp(cplx{0.0, -0.5 * h * m});
    q2[m] = q[m] * q[m];
  }
  Eigen::VectorXcd p(nk), p2(nk);
  for (int k = 0; k < nk; ++k) {
    p[k] = std::exp(cplx{0.0, -0.5 * h * grid.delta(k)});
    p2[k] = p[k] * p[k];
  }
  const cplx p_sum = p.sum();
  const double nk_d = static_cast<double>(nk);

  // Only rows of the parity classes present initially can ever be populated.
  bool parity_live[2] = {false, false};
  for (int n = 0; n < ns; ++n)
    if (initial.a_amp[n] != 0.0)
      parity_live[n % 2] = true;
  for (int m = 0; m < nf; ++m)
    if (initial.b_amp.row(m).cwiseAbs().maxCoeff() > 0.0)
      parity_live[m % 2] = true;
  std::vector<int> rows;
  for (int m = 0; m < nf; ++m)
    if (parity_live[m % 2])
      rows.push_back(m);

  // Column m of `b` holds the k-modes of phonon row m contiguously.
  Eigen::MatrixXcd b = initial.b_amp.transpose();
  Eigen::VectorXcd a = initial.a_amp;
  AmplitudeField field;
  field.time = initial.time;

  auto coupling_a = [&](const Eigen::VectorXcd &sums) -> Eigen::VectorXcd {
    return minus_iv * (ov.transpose() * sums);
  };
  auto coupling_b = [&](const Eigen::VectorXcd &amps) -> Eigen::VectorXcd {
    return minus_iv * (ov * amps);
  };
  auto observe = [&](double t) {
    field.a_amp = a;
    field.b_amp = b.transpose();
    field.time = t;
    options.observer(field);
  };

  const double norm0 = a.squaredNorm() + b.squaredNorm();
  if (options.observer && options.observe_every > 0)
    observe(initial.time);

  Eigen::VectorXcd s0(nf), s_e(nf), s_e2(nf);
  for (int step = 0; step < steps; ++step) {
    s0.setZero();
    s_e.setZero();
    s_e2.setZero();
    for (int m : rows) {
      const auto col = b.col(m);
      s0[m] = col.sum();
      s_e[m] = q[m] * p.cwiseProduct(col).sum();
      s_e2[m] = q2[m] * p2.cwiseProduct(col).sum();
    }

    const Eigen::VectorXcd k1a = coupling_a(s0);
    const Eigen::VectorXcd beta1 = coupling_b(a);

    const Eigen::VectorXcd a2 = ea.cwiseProduct(a + 0.5 * h * k1a);
    const Eigen::VectorXcd s2 = s_e + (0.5 * h * p_sum) * q.cwiseProduct(beta1);
    const Eigen::VectorXcd k2a = coupling_a(s2);
    const Eigen::VectorXcd beta2 = coupling_b(a2);

    const Eigen::VectorXcd a3 = ea.cwiseProduct(a) + 0.5 * h * k2a;
    const Eigen::VectorXcd s3 = s_e + (0.5 * h * nk_d) * beta2;
    const Eigen::VectorXcd k3a = coupling_a(s3);
    const Eigen::VectorXcd beta3 = coupling_b(a3);

    const Eigen::VectorXcd a4 = ea2.cwiseProduct(a) + h * ea.cwiseProduct(k3a);
    const Eigen::VectorXcd s4 = s_e2 + (h * p_sum) * q.cwiseProduct(beta3);
    const Eigen::VectorXcd k4a = coupling_a(s4);
    const Eigen::VectorXcd beta4 = coupling_b(a4);

    a = ea2.cwiseProduct(a) + (h / 6.0) * (ea2.cwiseProduct(k1a) +
                                           2.0 * ea.cwiseProduct(k2a + k3a) + k4a);
    for (int m : rows) {
      auto col = b.col(m);
      const cplx c1 = (h / 6.0) * beta1[m];
      const cplx c23 = (h / 3.0) * q[m] * (beta2[m] + beta3[m]);
      const cplx c4 = (h / 6.0) * beta4[m];
      col = q2[m] * p2.cwiseProduct(col.array().matrix() + Eigen::VectorXcd::Constant(nk, c1)) +
            c23 * p + Eigen::VectorXcd::Constant(nk, c4);
    }

    if (options.observer && options.observe_every > 0 && (step + 1) % options.observe_every == 0)
      observe(initial.time + (step + 1) * h);
  }

  field.a_amp = a;
  field.b_amp = b.transpose();
  field.time = t_final;
  const double drift = std::abs(field.norm() - norm0);
  if (drift > options.max_norm_drift)
    throw ConvergenceError("norm drifted by " + std::to_string(drift) +
                               "; reduce the time step",
                           drift);
  return field;
}

std::vector<double> oracle_spectrum(const AmplitudeField &field, const ContinuumGrid &grid) {
  const int nk = static_cast<int>(field.b_amp.cols());
  std::vector<double> s(nk);
  for (int k = 0; k < nk; ++k)
    s[k] = field.b_amp.col(k).squaredNorm() / grid.spacing;
  return s;
}

Eigen::MatrixXd expm_squeezer(double eta, int dim) {
  if (dim < 2)
    throw ParameterError("expm_squeezer needs dim >= 2");
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 2; n < dim; ++n) {
    const double amp = 0.5 * eta * std::sqrt(static_cast<double>(n) * (n - 1));
    gen(n - 2, n) += amp; // b^2
    gen(n, n - 2) -= amp; // -b^dag^2
  }

  // Scale until the norm is below 1/2, Taylor-expand, square back.
  const double norm = gen.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5)
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd scaled = gen / std::ldexp(1.0, squarings);

  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(dim, dim);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18)
      break;
  }
  for (int i = 0; i < squarings; ++i)
    result = result * result;
  return result;
}

OnePhotonEigensystem diagonalize_one_photon(const SystemParams &params, int dim) {
  params.validate();
  if (dim < 2)
    throw ParameterError("diagonalize_one_photon needs dim >= 2");
  // (b + b^dag)^2 = b^2 + b^dag^2 + 2 b^dag b + 1, taken element-wise so the
  // truncation edge carries no spurious term.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int m = 0; m < dim; ++m) {
    h(m, m) = m + params.g0 * (2.0 * m + 1.0);
    if (m + 2 < dim) {
      const double off = params.g0 * std::sqrt((m + 1.0) * (m + 2.0));
      h(m, m + 2) = off;
      h(m + 2, m) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("dense eigensolver failed", 0.0);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

DiscrepancyRecord compare_report(const SpectralDensity &closed_form, const AmplitudeField &run,
                                 const ContinuumGrid &grid, double tolerance) {
  const FrequencyGrid expected = grid.frequency_grid();
  const auto &g = closed_form.grid;
  const double slack = 1e-9 * grid.spacing;
  if (g.points != expected.points || std::abs(g.min - expected.min) > slack ||
      std::abs(g.max - expected.max) > slack || run.b_amp.cols() != expected.points)
    throw ConfigError("closed-form spectrum and oracle run use different frequency grids");

  const auto oracle = oracle_spectrum(run, grid);
  DiscrepancyRecord rec;
  rec.tolerance = tolerance;
  rec.points = expected.points;
  double peak = 0.0, worst = -1.0, diff2 = 0.0, ref2 = 0.0;
  for (int k = 0; k < expected.points; ++k) {
    const double ref = closed_form.values[k];
    const double d = std::abs(oracle[k] - ref);
    peak = std::max(peak, std::abs(ref));
    diff2 += d * d;
    ref2 += ref * ref;
    if (d > worst) {
      worst = d;
      rec.worst_delta = expected.at(k);
    }
  }
  rec.linf_relative = peak > 0.0 ? worst / peak : worst;
  rec.l2_relative = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
  rec.pass = rec.linf_relative < tolerance;
  return rec;
}

} // namespace quadropt::oracle
