#pragma once

// Scattering of a single-photon Lorentzian wave packet off the cavity.

#include <span>
#include <vector>

#include "quadropt/emission.hpp"
#include "quadropt/quadrature.hpp"

namespace quadropt {

struct WavePacket {
  double delta0 = 0.0;  // detuning centre
  double epsilon = 0.1; // spectral half-width

  void validate() const;
  // sqrt(eps/pi) / (delta - delta0 + i eps)
  cplx amplitude(double delta) const;
};

class ScatteringModel {
public:
  ScatteringModel(const SystemParams &params, const WavePacket &packet);

  const EmissionModel &emission() const { return emission_; }
  const WavePacket &packet() const { return packet_; }

  // Direct-reflection and cavity parts of B_{n0,m}(delta) for all m.
  void amplitudes_at(int n0, double delta, Eigen::VectorXcd &direct, Eigen::VectorXcd &cavity,
                     double t = 0.0) const;
  void total_at(int n0, double delta, Eigen::VectorXcd &out, double t = 0.0) const;

  // Frequencies where the integrand of any (n0 -> m) channel changes fast:
  // shifted packet centres and cavity poles of significant weight, padded by
  // a few widths on both sides.
  std::vector<double> features(const std::vector<int> &initial_indices) const;

private:
  EmissionModel emission_;
  WavePacket packet_;
};

struct ScatterAmplitude {
  int n0 = 0;
  FrequencyGrid grid;
  // (m, k) matrices; direct is non-zero only in row n0.
  Eigen::MatrixXcd direct;
  Eigen::MatrixXcd cavity;
  double truncated_weight = 0.0;

  Eigen::MatrixXcd total() const { return direct + cavity; }
};

ScatterAmplitude scattering_amplitudes(int n0, const WavePacket &packet,
                                       const SystemParams &params, const FrequencyGrid &grid,
                                       double t = 0.0);

SpectralDensity scattering_spectrum(const MechState &initial, const WavePacket &packet,
                                    const SystemParams &params, const FrequencyGrid &grid,
                                    double t = 0.0);

struct ResonancePair {
  int n0 = 0;
  int n = 0; // dressed level reached by the injected photon
  int m = 0; // bare phonon index after re-emission
  double injection = 0.0; // delta0 = delta1 + n omega_m1 - n0
  double emission = 0.0;  // delta_k = delta1 + n omega_m1 - m
};

std::vector<ResonancePair> scattering_resonances(int n0, const SystemParams &params,
                                                 int max_order);

// Outcome of the reduced-density quadrature.
struct ScatterDensity {
  MechState state;
  double quadrature_error = 0.0;
  int evaluations = 0;
};

ScatterDensity scattering_reduced_density_detailed(const MechState &initial,
                                                   const WavePacket &packet,
                                                   const SystemParams &params,
                                                   const QuadratureOptions &options = {});

// rho_{l l'} = sum_ij rho_ij(0) int B_{i,l} B*_{j,l'} d delta over the real line.
MechState scattering_reduced_density(const MechState &initial, const WavePacket &packet,
                                     const SystemParams &params,
                                     const QuadratureOptions &options = {});

// Linear entropy of the reduced phonon state for each packet centre in
// delta0s. The initial state must be pure.
std::vector<double> scattering_entropy_profile(const MechState &initial,
                                               const SystemParams &params,
                                               std::span<const double> delta0s, double epsilon,
                                               const QuadratureOptions &options = {});

} // namespace quadropt
