#include "quadropt/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace quadropt {

double SpectralDensity::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double trapezoid(const FrequencyGrid &grid, const std::vector<double> &values) {
  if (values.size() < 2)
    return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    sum += values[i];
  return sum * grid.step();
}

std::vector<Peak> find_peaks(const FrequencyGrid &grid, const std::vector<double> &y) {
  std::vector<Peak> peaks;
  const int n = static_cast<int>(y.size());
  for (int i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1]))
      continue;
    // Accept the left end of a flat top.
    int j = i + 1;
    while (j < n && y[j] == y[i])
      ++j;
    if (j == n || !(y[j] < y[i]))
      continue;

    double left_min = y[i];
    int k = i - 1;
    for (; k >= 0 && y[k] <= y[i]; --k)
      left_min = std::min(left_min, y[k]);
    double right_min = y[i];
    for (k = j; k < n && y[k] <= y[i]; ++k)
      right_min = std::min(right_min, y[k]);

    Peak p;
    p.index = i;
    p.position = grid.at(i);
    p.height = y[i];
    p.prominence = y[i] - std::max(left_min, right_min);
    peaks.push_back(p);
    i = j - 1;
  }
  return peaks;
}

std::vector<Peak> prominent_peaks(const FrequencyGrid &grid, const std::vector<double> &y,
                                  double fraction) {
  if (y.empty())
    return {};
  const double top = *std::max_element(y.begin(), y.end());
  std::vector<Peak> out;
  for (const auto &p : find_peaks(grid, y))
    if (p.prominence >= fraction * top)
      out.push_back(p);
  std::sort(out.begin(), out.end(), [](const Peak &a, const Peak &b) { return a.height > b.height; });
  return out;
}

} // namespace quadropt
