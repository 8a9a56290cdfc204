#include "quadropt/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "quadropt/errors.hpp"
#include "quadropt/parallel.hpp"

namespace quadropt {

namespace {

double log_factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(512);
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
      t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (n < static_cast<int>(table.size()))
    return table[n];
  return std::lgamma(n + 1.0);
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

} // namespace

void SystemParams::validate() const {
  if (!std::isfinite(g0) || !(g0 > -0.25))
    throw ParameterError("g0 = " + format_number(g0) +
                         " violates one-photon stability (g0 > -1/4 in units of omega_M)");
  if (!std::isfinite(gamma_c) || !(gamma_c > 0.0))
    throw ParameterError("gamma_c must be positive, got " + format_number(gamma_c));
  if (n_fock < 2 || n_squeezed < 2)
    throw ParameterError("n_fock and n_squeezed must both be >= 2");
  if (n_squeezed > n_fock)
    throw ParameterError("n_squeezed (" + std::to_string(n_squeezed) + ") exceeds n_fock (" +
                         std::to_string(n_fock) + ")");
  if (damping) {
    if (!(damping->gamma_m >= 0.0) || !(damping->nbar_th >= 0.0))
      throw ParameterError("damping estimate needs gamma_m >= 0 and nbar_th >= 0");
  }
}

DressedParams derive_dressed(const SystemParams &params) {
  if (!(params.g0 > -0.25))
    throw ParameterError("g0 = " + format_number(params.g0) +
                         " violates one-photon stability (g0 > -1/4 in units of omega_M)");
  const double ratio = 1.0 + 4.0 * params.g0;
  DressedParams d;
  d.omega_m1 = std::sqrt(ratio);
  d.delta1 = 0.5 * (d.omega_m1 - 1.0);
  d.eta1 = 0.25 * std::log(ratio);
  return d;
}

bool ambiguous_sideband_regime(const SystemParams &params) {
  const auto d = derive_dressed(params);
  return d.omega_m1 > params.gamma_c && params.gamma_c > 1.0;
}

double overlap_element(int m, int n, double eta) {
  if (m < 0 || n < 0)
    throw ParameterError("overlap indices must be non-negative");
  if ((m + n) % 2 != 0)
    return 0.0;
  if (eta == 0.0)
    return m == n ? 1.0 : 0.0;

  // Single sum: the Kronecker delta fixes l' = (m - n)/2 + l.
  const double ch = std::cosh(eta);
  const double half_th = 0.5 * std::tanh(eta);
  const double log_ch = std::log(ch);
  const double log_th = std::log(std::abs(half_th));
  const bool th_negative = half_th < 0.0;
  const double prefactor = 0.5 * (log_factorial(m) + log_factorial(n)) - (n + 0.5) * log_ch;

  long double sum = 0.0L;
  for (int l = 0; 2 * l <= n; ++l) {
    const int lp = (m - n) / 2 + l;
    if (lp < 0 || 2 * lp > m)
      continue;
    const int power = l + lp;
    const double log_mag = prefactor + power * log_th + 2.0 * l * log_ch - log_factorial(l) -
                           log_factorial(lp) - log_factorial(n - 2 * l);
    bool negative = (lp % 2) != 0;
    if (th_negative && (power % 2) != 0)
      negative = !negative;
    const long double term = std::exp(static_cast<long double>(log_mag));
    sum += negative ? -term : term;
  }
  return static_cast<double>(sum);
}

OverlapMatrix overlap_matrix(const SystemParams &params) {
  params.validate();
  const double eta = derive_dressed(params).eta1;
  const int rows = params.n_fock;
  const int cols = params.n_squeezed;

  OverlapMatrix out;
  out.entries = Eigen::MatrixXd::Zero(rows, cols);
  parallel_for(cols, [&](std::size_t n) {
    for (int m = static_cast<int>(n) % 2; m < rows; m += 2)
      out.entries(m, static_cast<Eigen::Index>(n)) = overlap_element(m, static_cast<int>(n), eta);
  });

  const Eigen::MatrixXd gram = out.entries.transpose() * out.entries;
  out.column_deficit.resize(cols);
  for (int n = 0; n < cols; ++n)
    out.column_deficit[n] = 1.0 - gram(n, n);
  out.orthonormality_defect = (gram - Eigen::MatrixXd::Identity(cols, cols)).cwiseAbs().maxCoeff();
  return out;
}

StateSpec StateSpec::parse(const std::string &text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ParameterError("initial state must look like fock:N, coherent:B or thermal:NBAR, got '" +
                         text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  StateSpec spec;
  std::size_t used = 0;
  try {
    spec.value = std::stod(value, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw ParameterError("cannot parse initial-state value '" + value + "'");

  if (kind == "fock") {
    spec.kind = StateKind::fock;
    if (spec.value < 0 || spec.value != std::floor(spec.value))
      throw ParameterError("fock index must be a non-negative integer");
  } else if (kind == "coherent") {
    spec.kind = StateKind::coherent;
  } else if (kind == "thermal") {
    spec.kind = StateKind::thermal;
    if (spec.value < 0)
      throw ParameterError("thermal occupation must be non-negative");
  } else {
    throw ParameterError("unknown initial-state kind '" + kind + "'");
  }
  return spec;
}

std::string StateSpec::to_string() const {
  switch (kind) {
  case StateKind::fock:
    return "fock:" + std::to_string(static_cast<int>(value));
  case StateKind::coherent:
    return "coherent:" + format_number(value);
  case StateKind::thermal:
    return "thermal:" + format_number(value);
  case StateKind::reduced:
    break;
  }
  return "reduced";
}

std::string MechState::label() const {
  if (kind == StateKind::reduced)
    return "reduced";
  return StateSpec{kind, parameter}.to_string();
}

double MechState::purity() const { return (rho * rho).trace().real(); }

bool MechState::is_pure(double tol) const { return std::abs(1.0 - purity()) <= tol; }

MechState initial_state(const StateSpec &spec, const SystemParams &params) {
  params.validate();
  const int dim = params.n_fock;
  MechState state;
  state.kind = spec.kind;
  state.parameter = spec.value;
  state.rho = Eigen::MatrixXcd::Zero(dim, dim);

  switch (spec.kind) {
  case StateKind::fock: {
    const int n0 = static_cast<int>(spec.value);
    if (n0 >= dim)
      throw TruncationError("fock index " + std::to_string(n0) + " not below n_fock = " +
                                std::to_string(dim),
                            1.0, n0 + 1);
    state.rho(n0, n0) = 1.0;
    break;
  }
  case StateKind::coherent: {
    const double beta = spec.value;
    const double b2 = beta * beta;
    // c_m = e^{-|b|^2/2} b^m / sqrt(m!)
    Eigen::VectorXd c(dim);
    for (int m = 0; m < dim; ++m) {
      if (beta == 0.0) {
        c[m] = m == 0 ? 1.0 : 0.0;
        continue;
      }
      const double mag = std::exp(-0.5 * b2 + m * std::log(std::abs(beta)) - 0.5 * log_factorial(m));
      c[m] = (beta < 0 && m % 2 == 1) ? -mag : mag;
    }
    state.rho = (c * c.transpose()).cast<cplx>();
    break;
  }
  case StateKind::thermal: {
    const double nbar = spec.value;
    const double ratio = nbar / (1.0 + nbar);
    for (int m = 0; m < dim; ++m)
      state.rho(m, m) = std::pow(ratio, m) / (1.0 + nbar);
    break;
  }
  case StateKind::reduced:
    throw ParameterError("reduced states are produced by computation, not requested");
  }

  const double trace = state.rho.trace().real();
  state.trace_deficit = 1.0 - trace;
  if (trace < kMinInitialTrace) {
    // Smallest basis whose truncated trace clears the threshold.
    int need = dim;
    if (spec.kind == StateKind::coherent) {
      const double b2 = spec.value * spec.value;
      double acc = 0.0;
      for (need = 0; acc < kMinInitialTrace && need < 100000; ++need)
        acc += std::exp(-b2 + need * std::log(b2) - log_factorial(need));
    } else if (spec.kind == StateKind::thermal) {
      const double ratio = spec.value / (1.0 + spec.value);
      need = static_cast<int>(std::ceil(std::log(1.0 - kMinInitialTrace) / std::log(ratio)));
    }
    throw TruncationError("initial state " + spec.to_string() + " keeps only trace " +
                              format_number(trace) + " in n_fock = " + std::to_string(dim) +
                              "; need n_fock >= " + std::to_string(need),
                          1.0 - trace, need);
  }
  return state;
}

cplx apply_damping_estimate(const SystemParams &params) {
  if (!params.damping)
    return {1.0, 0.0};
  const auto &d = *params.damping;
  return {1.0, -0.5 * d.gamma_m * (2.0 * d.nbar_th + 1.0)};
}

FrequencyGrid FrequencyGrid::parse(const std::string &text) {
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) ||
      !ss.eof())
    throw ParameterError("grid must look like MIN:MAX:POINTS, got '" + text + "'");
  FrequencyGrid g;
  try {
    g.min = std::stod(a);
    g.max = std::stod(b);
    g.points = std::stoi(c);
  } catch (const std::exception &) {
    throw ParameterError("grid must look like MIN:MAX:POINTS, got '" + text + "'");
  }
  g.validate();
  return g;
}

std::string FrequencyGrid::to_string() const {
  return format_number(min) + ":" + format_number(max) + ":" + std::to_string(points);
}

void FrequencyGrid::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !(max > min))
    throw ParameterError("grid bounds must satisfy min < max");
  if (points < 2)
    throw ParameterError("grid needs at least two points");
}

std::vector<double> FrequencyGrid::values() const {
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i)
    v[i] = at(i);
  return v;
}

} // namespace quadropt
