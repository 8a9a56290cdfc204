#pragma once

// Model constants, dressed one-photon quantities, squeezed number-state
// overlaps and initial mechanical states.
//
// All frequencies are dimensionless multiples of the bare mechanical
// frequency (omega_M = 1). The cavity decay rate gamma_c and the coupling
// g0 are given in the same units.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace quadropt {

using cplx = std::complex<double>;

struct DampingEstimate {
  double gamma_m = 0.0; // mechanical decay rate
  double nbar_th = 0.0; // thermal phonon occupation
};

struct SystemParams {
  double g0 = 0.0;
  double gamma_c = 0.2;
  int n_fock = 40;     // bare phonon basis size
  int n_squeezed = 30; // squeezed (dressed) basis size
  std::optional<DampingEstimate> damping;

  // Throws ParameterError on g0 <= -1/4, gamma_c <= 0 or bad cutoffs.
  void validate() const;
};

struct DressedParams {
  double omega_m1 = 1.0; // one-photon mechanical frequency
  double delta1 = 0.0;   // one-photon level shift
  double eta1 = 0.0;     // squeezing factor
};

DressedParams derive_dressed(const SystemParams &params);

// True when omega_M^(1) > gamma_c > omega_M, the regime in which the two
// candidate resolved-sideband conditions disagree. Only reported, never acted on.
bool ambiguous_sideband_regime(const SystemParams &params);

// <m| S_b(eta) |n> with S_b(eta) = exp[eta/2 (b^2 - b^dag^2)].
double overlap_element(int m, int n, double eta);

struct OverlapMatrix {
  // entries(m, n) = <m|S_b(eta1)|n>, n_fock x n_squeezed.
  Eigen::MatrixXd entries;
  // 1 - sum_m entries(m,n)^2 for each column n.
  std::vector<double> column_deficit;
  // max |sum_m e(m,n) e(m,n') - delta_{nn'}| over all column pairs.
  double orthonormality_defect = 0.0;

  double operator()(int m, int n) const { return entries(m, n); }
  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
};

OverlapMatrix overlap_matrix(const SystemParams &params);

enum class StateKind { fock, coherent, thermal, reduced };

// Initial-state selector as written on the command line: fock:N,
// coherent:BETA (real amplitude), thermal:NBAR.
struct StateSpec {
  StateKind kind = StateKind::fock;
  double value = 0.0;

  static StateSpec parse(const std::string &text);
  std::string to_string() const;
  bool operator==(const StateSpec &) const = default;
};

struct MechState {
  Eigen::MatrixXcd rho;
  StateKind kind = StateKind::reduced;
  double parameter = 0.0;
  double trace_deficit = 0.0; // 1 - Tr(rho)
  // Largest |rho - rho^dag| entry seen when the matrix was assembled.
  double hermiticity_residual = 0.0;

  int dim() const { return static_cast<int>(rho.rows()); }
  std::string label() const;
  double purity() const; // Tr(rho^2)
  bool is_pure(double tol = 1e-9) const;
};

// Truncated-trace threshold for coherent and thermal states.
inline constexpr double kMinInitialTrace = 0.999;

MechState initial_state(const StateSpec &spec, const SystemParams &params);

// omega_M with the mechanical-damping estimate folded in as an imaginary
// part, omega_M - i gamma_M (2 nbar + 1)/2. Purely real without damping.
cplx apply_damping_estimate(const SystemParams &params);

// Uniform frequency grid MIN:MAX:POINTS (inclusive end points).
struct FrequencyGrid {
  double min = -6.0;
  double max = 8.0;
  int points = 4001;

  static FrequencyGrid parse(const std::string &text);
  std::string to_string() const;
  void validate() const;
  double step() const { return points > 1 ? (max - min) / (points - 1) : 0.0; }
  double at(int i) const { return points > 1 ? min + (max - min) * i / (points - 1) : min; }
  std::vector<double> values() const;
};

} // namespace quadropt
