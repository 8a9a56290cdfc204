#include "quadropt/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include "quadropt/errors.hpp"

namespace quadropt {

namespace {

// Kronrod abscissae (positive half, descending) and weights; Gauss weights
// belong to the odd-indexed Kronrod nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class Map { finite, right_tail, left_tail };

struct Panel {
  double a = 0.0, b = 0.0; // in the mapped variable
  Map map = Map::finite;
  double origin = 0.0; // tail anchor
  Eigen::VectorXcd value;
  double error = 0.0;
  bool operator<(const Panel &o) const { return error < o.error; }
};

class Integrator {
public:
  Integrator(const VectorIntegrand &f, int dim) : f_(f), dim_(dim), buf_(dim) {}

  void evaluate(Panel &p) {
    const double centre = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    Eigen::VectorXcd kron = Eigen::VectorXcd::Zero(dim_);
    Eigen::VectorXcd gauss = Eigen::VectorXcd::Zero(dim_);
    for (int j = 0; j < 8; ++j) {
      const int signs = j == 7 ? 1 : 2;
      for (int s = 0; s < signs; ++s) {
        const double u = centre + (s == 0 ? 1.0 : -1.0) * half * kXgk[j];
        sample(p, u);
        kron += kWgk[j] * buf_;
        if (j % 2 == 1) // odd Kronrod nodes, centre included, are the Gauss nodes
          gauss += kWg[j / 2] * buf_;
      }
    }
    p.value = half * kron;
    p.error = half * (kron - gauss).cwiseAbs().maxCoeff();
  }

  int evaluations() const { return evaluations_; }

private:
  void sample(const Panel &p, double u) {
    ++evaluations_;
    double x = u, jac = 1.0;
    if (p.map != Map::finite) {
      const double r = 1.0 / (1.0 - u);
      x = p.map == Map::right_tail ? p.origin + u * r : p.origin - u * r;
      jac = r * r;
    }
    f_(x, buf_);
    if (jac != 1.0)
      buf_ *= jac;
  }

  const VectorIntegrand &f_;
  int dim_;
  Eigen::VectorXcd buf_;
  int evaluations_ = 0;
};

QuadratureResult run(Integrator &integ, std::vector<Panel> panels, int dim,
                     const QuadratureOptions &opt) {
  std::priority_queue<Panel> queue;
  Eigen::VectorXcd total = Eigen::VectorXcd::Zero(dim);
  double error = 0.0;
  for (auto &p : panels) {
    integ.evaluate(p);
    total += p.value;
    error += p.error;
    queue.push(std::move(p));
  }

  int count = static_cast<int>(queue.size());
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * total.cwiseAbs().maxCoeff()); };
  while (error > target() && count < opt.max_panels) {
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      queue.push(std::move(worst));
      break; // cannot split further in double precision
    }
    Panel left{worst.a, mid, worst.map, worst.origin, {}, 0.0};
    Panel right{mid, worst.b, worst.map, worst.origin, {}, 0.0};
    integ.evaluate(left);
    integ.evaluate(right);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(std::move(left));
    queue.push(std::move(right));
    ++count;
  }

  // Re-sum from panels to shed accumulated rounding in the running total.
  QuadratureResult res;
  res.value = Eigen::VectorXcd::Zero(dim);
  res.error = 0.0;
  while (!queue.empty()) {
    const Panel &p = queue.top();
    res.value += p.value;
    res.error += p.error;
    if (p.map != Map::finite)
      res.tail_value += p.value.cwiseAbs().maxCoeff();
    queue.pop();
  }
  res.panels = count;
  res.evaluations = integ.evaluations();
  res.converged = res.error <= target();
  return res;
}

} // namespace

QuadratureResult integrate_real_line(const VectorIntegrand &f, int dim,
                                     std::vector<double> breakpoints,
                                     const QuadratureOptions &options) {
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  if (breakpoints.size() < 2)
    throw ParameterError("integrate_real_line needs two distinct breakpoints");

  std::vector<Panel> panels;
  panels.push_back({0.0, 1.0, Map::left_tail, breakpoints.front(), {}, 0.0});
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    panels.push_back({breakpoints[i], breakpoints[i + 1], Map::finite, 0.0, {}, 0.0});
  panels.push_back({0.0, 1.0, Map::right_tail, breakpoints.back(), {}, 0.0});

  Integrator integ(f, dim);
  return run(integ, std::move(panels), dim, options);
}

QuadratureResult integrate_outside(const VectorIntegrand &f, int dim, double lo, double hi,
                                   std::vector<double> breakpoints,
                                   const QuadratureOptions &options) {
  if (!(hi > lo))
    throw ParameterError("integrate_outside needs lo < hi");
  std::vector<double> left{lo}, right{hi};
  for (double x : breakpoints) {
    if (x < lo)
      left.push_back(x);
    else if (x > hi)
      right.push_back(x);
  }
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  left.erase(std::unique(left.begin(), left.end()), left.end());
  right.erase(std::unique(right.begin(), right.end()), right.end());

  std::vector<Panel> panels;
  panels.push_back({0.0, 1.0, Map::left_tail, left.front(), {}, 0.0});
  for (std::size_t i = 0; i + 1 < left.size(); ++i)
    panels.push_back({left[i], left[i + 1], Map::finite, 0.0, {}, 0.0});
  for (std::size_t i = 0; i + 1 < right.size(); ++i)
    panels.push_back({right[i], right[i + 1], Map::finite, 0.0, {}, 0.0});
  panels.push_back({0.0, 1.0, Map::right_tail, right.back(), {}, 0.0});

  Integrator integ(f, dim);
  return run(integ, std::move(panels), dim, options);
}

QuadratureResult integrate_interval(const VectorIntegrand &f, int dim, double a, double b,
                                    const QuadratureOptions &options) {
  Integrator integ(f, dim);
  return run(integ, {Panel{a, b, Map::finite, 0.0, {}, 0.0}}, dim, options);
}

} // namespace quadropt
