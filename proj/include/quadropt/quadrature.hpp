#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature of complex vector-valued
// integrands over the whole real line. The finite part is split at caller
// supplied breakpoints; the two tails are mapped onto [0, 1).

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace quadropt {

struct QuadratureOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int max_panels = 200000;
};

struct QuadratureResult {
  Eigen::VectorXcd value;
  double error = 0.0;      // summed Kronrod-Gauss difference (max norm)
  double tail_value = 0.0; // max-norm of the contribution from outside the breakpoints
  int panels = 0;
  int evaluations = 0;
  bool converged = false;
};

using VectorIntegrand = std::function<void(double x, Eigen::VectorXcd &out)>;

// Integral of f over (-inf, inf). `breakpoints` need not be sorted; at least
// two distinct finite values are required.
QuadratureResult integrate_real_line(const VectorIntegrand &f, int dim,
                                     std::vector<double> breakpoints,
                                     const QuadratureOptions &options = {});

// Integral of f over (-inf, lo] and [hi, inf). Breakpoints inside (lo, hi)
// are ignored.
QuadratureResult integrate_outside(const VectorIntegrand &f, int dim, double lo, double hi,
                                   std::vector<double> breakpoints,
                                   const QuadratureOptions &options = {});

// Integral of f over the finite interval [a, b].
QuadratureResult integrate_interval(const VectorIntegrand &f, int dim, double a, double b,
                                    const QuadratureOptions &options = {});

} // namespace quadropt
