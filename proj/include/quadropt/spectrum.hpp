#pragma once

#include <vector>

#include "quadropt/qcore.hpp"

namespace quadropt {

// Sampled photon spectrum S(delta_k) plus normalisation bookkeeping.
struct SpectralDensity {
  FrequencyGrid grid;
  std::vector<double> values;
  double norm = 0.0;            // trapezoid integral over the grid
  double tail_correction = 0.0; // closed-form spectrum integrated outside the grid
  double max_imag = 0.0;        // largest |Im S| before taking the real part
  double truncated_weight = 0.0; // bound on probability lost to basis cutoffs
  double uncovered_weight = 0.0; // weight of resonance lines outside the grid

  double total() const { return norm + tail_correction; }
  double max_value() const;
  bool coverage_ok() const { return uncovered_weight < 1e-4; }
};

double trapezoid(const FrequencyGrid &grid, const std::vector<double> &values);

struct Peak {
  int index = 0;
  double position = 0.0;
  double height = 0.0;
  double prominence = 0.0; // topographic prominence, same units as height
};

// Local maxima of y in ascending position order.
std::vector<Peak> find_peaks(const FrequencyGrid &grid, const std::vector<double> &y);

// Peaks whose prominence is at least `fraction` of the global maximum of y,
// sorted by decreasing height.
std::vector<Peak> prominent_peaks(const FrequencyGrid &grid, const std::vector<double> &y,
                                  double fraction);

} // namespace quadropt
