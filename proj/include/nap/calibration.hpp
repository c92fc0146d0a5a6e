#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nap {

// A published fidelity at a given decay ratio, read at the end of `step` (1-based).
struct CalibrationTarget {
  std::string protocol;  // "bell" or "ghz3"
  double kappa_over_omega = 0.0;
  std::size_t step = 1;
  double expected = 0.0;
  double tolerance = 0.0;
};

// The Bell and three-qubit GHZ fidelities quoted for decay ratios 5e-6 .. 5e-5.
std::vector<CalibrationTarget> published_fidelities();

struct CalibrationPoint {
  double omega_T = 0.0;
  std::vector<double> fidelities;  // one per target
  double worst = 0.0;              // max |F - expected| / tolerance
};

// Fidelities of every target at one omega*T (effective mode, open system).
CalibrationPoint evaluate_calibration(const std::vector<CalibrationTarget>& targets, double omega_T,
                                      std::size_t grid_steps = 2000);

// Golden-section search in log(omega*T) minimizing the worst normalized deviation.
CalibrationPoint calibrate_omega_T(const std::vector<CalibrationTarget>& targets, double lo, double hi,
                                   std::size_t iterations = 16, std::size_t grid_steps = 2000);

}  // namespace nap
