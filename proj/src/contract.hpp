#pragma once

// Shared contraction of per-initial-index amplitudes with an initial density
// matrix: S = sum_{l,i,j} rho_ij B_il conj(B_jl).

#include <vector>

#include "quadropt/qcore.hpp"

namespace quadropt::detail {

// Indices of rows/columns of rho that carry any non-zero entry.
inline std::vector<int> active_indices(const Eigen::MatrixXcd &rho) {
  std::vector<int> idx;
  for (int i = 0; i < rho.rows(); ++i)
    if (rho.row(i).cwiseAbs().maxCoeff() > 0.0 || rho.col(i).cwiseAbs().maxCoeff() > 0.0)
      idx.push_back(i);
  return idx;
}

inline Eigen::MatrixXcd restrict(const Eigen::MatrixXcd &rho, const std::vector<int> &idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd out(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      out(i, j) = rho(idx[i], idx[j]);
  return out;
}

// amps(i, l) = B_{idx[i], l}; returns the complex contraction.
inline cplx contract(const Eigen::MatrixXcd &rho_active, const Eigen::MatrixXcd &amps) {
  // sum_{i,l} B_il * sum_j rho_ij conj(B_jl)
  return (amps.array() * (rho_active * amps.conjugate()).array()).sum();
}

} // namespace quadropt::detail
