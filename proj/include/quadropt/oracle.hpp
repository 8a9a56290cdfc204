#pragma once

// Brute-force references for the closed forms: time-domain integration of
// the single-excitation amplitude equations over a discretised continuum,
// the squeeze operator as a matrix exponential, and dense diagonalisation of
// the one-photon mechanical Hamiltonian.

#include <functional>

#include "quadropt/scattering.hpp"

namespace quadropt::oracle {

// Outside-field modes delta_k = -span, -span + spacing, ..., span.
struct ContinuumGrid {
  double span = 15.0;
  double spacing = 0.005;

  int k_count() const;
  double delta(int k) const { return -span + k * spacing; }
  // Discrete hopping xi sqrt(dk) with xi = sqrt(gamma_c / 2 pi).
  double coupling(double gamma_c) const;
  FrequencyGrid frequency_grid() const;

  // Checks span >= 10 max(gamma_c, epsilon), spacing <= gamma_c / 20 and a
  // recurrence time 2 pi / spacing of at least 4 t_final.
  void validate(const SystemParams &params, double t_final, double epsilon = 0.0) const;
};

struct AmplitudeField {
  Eigen::VectorXcd a_amp; // cavity photon, membrane in |~m>, over n_squeezed
  Eigen::MatrixXcd b_amp; // outside photon in mode k, membrane in |m>: n_fock x k_count
  double time = 0.0;

  double cavity_population() const { return a_amp.squaredNorm(); }
  double norm() const { return a_amp.squaredNorm() + b_amp.squaredNorm(); }
};

// Photon in the cavity, membrane in |n0>: A_m = <~m|n0>, B = 0.
AmplitudeField emission_start(int n0, const SystemParams &params, const ContinuumGrid &grid);

// Photon in a discretised Lorentzian packet, membrane in |n0>. Mode
// amplitudes are the continuum packet times sqrt(spacing), not renormalised
// to the finite band. With lead_time > 0 the field starts at -lead_time,
// freely back-propagated so that it equals the packet at t = 0; the
// band-limited ringing ahead of the packet front then reaches the cavity as
// well instead of being cut off at the start.
AmplitudeField scattering_start(int n0, const WavePacket &packet, const SystemParams &params,
                                const ContinuumGrid &grid, double lead_time = 0.0);

struct IntegratorOptions {
  double dt = 0.01;
  double max_norm_drift = 1e-6;
  // Called every `observe_every` steps (and at the start) when set.
  int observe_every = 0;
  std::function<void(const AmplitudeField &)> observer;
};

// Fixed-step fourth-order integration of the amplitude equations. The free
// rotation of every amplitude is propagated exactly (integrating-factor
// RK4); the classical RK4 stages act on the cavity-continuum hopping only.
// Throws ConvergenceError when the norm drifts by more than max_norm_drift.
AmplitudeField integrate_amplitudes(const AmplitudeField &initial, const SystemParams &params,
                                    const ContinuumGrid &grid, double t_final,
                                    const IntegratorOptions &options = {});

// sum_m |B_{m,k}|^2 / dk on the grid modes.
std::vector<double> oracle_spectrum(const AmplitudeField &field, const ContinuumGrid &grid);

// exp[eta/2 (b^2 - b^dag^2)] in a dim-dimensional Fock space, by scaling and
// squaring of a Taylor series.
Eigen::MatrixXd expm_squeezer(double eta, int dim);

struct OnePhotonEigensystem {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors; // columns, Fock basis
};

// Dense eigendecomposition of b^dag b + g0 (b + b^dag)^2 truncated to dim.
OnePhotonEigensystem diagonalize_one_photon(const SystemParams &params, int dim);

struct DiscrepancyRecord {
  double linf_relative = 0.0; // max |S_oracle - S_closed| / max S_closed
  double l2_relative = 0.0;
  double worst_delta = 0.0;
  double tolerance = 0.02;
  int points = 0;
  bool pass = false;
};

// Compares a closed-form spectrum sampled on the oracle's mode grid against
// an oracle run. Throws ConfigError when the grids differ.
DiscrepancyRecord compare_report(const SpectralDensity &closed_form, const AmplitudeField &run,
                                 const ContinuumGrid &grid, double tolerance = 0.02);

} // namespace quadropt::oracle
