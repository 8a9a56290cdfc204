#pragma once

// Single-photon emission from a cavity holding one photon: long-time
// outgoing amplitudes, spectra, resonance lines and the reduced phonon state.

#include <string>
#include <vector>

#include "quadropt/qcore.hpp"
#include "quadropt/spectrum.hpp"

namespace quadropt {

// Precomputed dressed parameters and overlaps for repeated point evaluations.
class EmissionModel {
public:
  explicit EmissionModel(const SystemParams &params);

  const SystemParams &params() const { return params_; }
  const DressedParams &dressed() const { return dressed_; }
  const OverlapMatrix &overlaps() const { return overlaps_; }
  // Bare mechanical frequency, complex when the damping estimate is on.
  cplx omega_mech() const { return omega_mech_; }

  // Dressed level delta1 + n omega_m1.
  double dressed_level(int n) const { return dressed_.delta1 + n * dressed_.omega_m1; }

  // B_{n0,m}(delta) for all m < n_fock, written into out. With t != 0 the
  // free phase exp[-i (delta + m omega_M) t] is applied.
  void amplitudes_at(int n0, double delta, Eigen::VectorXcd &out, double t = 0.0) const;
  cplx amplitude(int n0, int m, double delta, double t = 0.0) const;

  // S(delta) = sum_{l,m,n} rho_mn B_{m,l} B*_{n,l} at a single frequency.
  double spectrum_at(const MechState &initial, double delta) const;

  // 1 - sum_{n < n_squeezed} <n0|~n>^2, weight of |n0> outside the squeezed basis.
  double row_deficit(int n0) const;

private:
  SystemParams params_;
  DressedParams dressed_;
  OverlapMatrix overlaps_;
  cplx omega_mech_;
};

struct EmissionAmplitude {
  int n0 = 0;
  FrequencyGrid grid;
  // values(m, k) = B_{n0,m}(delta_k), n_fock x grid.points
  Eigen::MatrixXcd values;
  double truncated_weight = 0.0;
  double uncovered_weight = 0.0;
};

// Basis weight that may be dropped before amplitudes count as truncated.
inline constexpr double kTruncationTolerance = 1e-3;

EmissionAmplitude emission_amplitudes(int n0, const SystemParams &params,
                                      const FrequencyGrid &grid, double t = 0.0);

SpectralDensity emission_spectrum(const MechState &initial, const SystemParams &params,
                                  const FrequencyGrid &grid, double t = 0.0);

struct ResonanceLine {
  int n = 0; // dressed phonon index of the one-photon level
  int m = 0; // bare phonon index after emission
  double position = 0.0; // delta1 + n omega_m1 - m
  double weight = 0.0;   // population of |~n> times |<m|~n>|^2
  std::string transition_label;
};

enum class Parity { even, odd };

// Lines with non-zero weight for the given initial state, n, m < max_order,
// sorted by position.
std::vector<ResonanceLine> resonance_lines(const MechState &initial, const SystemParams &params,
                                           int max_order);
// Parity-only variant: every (n, m) pair of the given parity.
std::vector<ResonanceLine> resonance_lines(Parity parity, const SystemParams &params,
                                           int max_order);

// Perturbative height of the delta1 - 2 sideband over the main-peak
// Lorentzian tail: 1 + 8 g0^2 / gamma_c^2.
double sideband_ratio_estimate(const SystemParams &params);

// Same ratio evaluated from the exact spectrum for a ground-state membrane.
double sideband_ratio_exact(const SystemParams &params);

// Long-time reduced phonon density matrix after emission.
MechState emission_reduced_density(const MechState &initial, const SystemParams &params,
                                   double t = 0.0);

// 1 - Tr(rho^2).
double linear_entropy(const MechState &rho);
double linear_entropy(const Eigen::MatrixXcd &rho);

// Photon-phonon linear entropy after emission; the initial state must be pure.
double emission_entropy(const MechState &initial, const SystemParams &params);

} // namespace quadropt
