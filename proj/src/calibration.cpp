#include "nap/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "nap/errors.hpp"
#include "nap/protocols.hpp"

namespace nap {

std::vector<CalibrationTarget> published_fidelities() {
  return {
      {"bell", 5e-6, 1, 0.997, 0.005},  {"bell", 2.5e-5, 1, 0.980, 0.005}, {"bell", 5e-5, 1, 0.962, 0.005},
      {"bell", 2.5e-5, 2, 0.912, 0.01}, {"bell", 5e-5, 2, 0.836, 0.01},    {"ghz3", 5e-6, 3, 0.965, 0.007},
      {"ghz3", 5e-5, 3, 0.735, 0.02},
  };
}

CalibrationPoint evaluate_calibration(const std::vector<CalibrationTarget>& targets, double omega_T,
                                      std::size_t grid_steps) {
  const ProtocolPlan bell = plan_bell(1.0, BoundaryChoice::Caption, grid_steps);
  const ProtocolPlan ghz = plan_ghz(3, 1.0, grid_steps);
  std::map<std::pair<std::string, double>, std::vector<double>> runs;
  CalibrationPoint point;
  point.omega_T = omega_T;
  for (const CalibrationTarget& t : targets) {
    const auto key = std::make_pair(t.protocol, t.kappa_over_omega);
    auto it = runs.find(key);
    if (it == runs.end()) {
      const bool is_bell = t.protocol == "bell";
      if (!is_bell && t.protocol != "ghz3") {
        throw MissingSymbolError("unknown calibration protocol '" + t.protocol + "'");
      }
      QubitModel model;
      model.count = is_bell ? 2 : 3;
      model.omega_T = omega_T;
      model.kappa_T = t.kappa_over_omega * omega_T;
      RunOptions options;
      options.grid_steps = grid_steps;
      it = runs.emplace(key, run_protocol(is_bell ? bell : ghz, model, options).step_fidelities).first;
    }
    const double f = it->second.at(t.step - 1);
    point.fidelities.push_back(f);
    point.worst = std::max(point.worst, std::abs(f - t.expected) / t.tolerance);
  }
  return point;
}

CalibrationPoint calibrate_omega_T(const std::vector<CalibrationTarget>& targets, double lo, double hi,
                                   std::size_t iterations, std::size_t grid_steps) {
  if (!(lo > 0.0 && hi > lo)) {
    throw DomainError("calibration bracket must satisfy 0 < lo < hi");
  }
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo);
  double b = std::log(hi);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  CalibrationPoint pc = evaluate_calibration(targets, std::exp(c), grid_steps);
  CalibrationPoint pd = evaluate_calibration(targets, std::exp(d), grid_steps);
  for (std::size_t i = 0; i < iterations; ++i) {
    if (pc.worst <= pd.worst) {
      b = d;
      d = c;
      pd = pc;
      c = b - ratio * (b - a);
      pc = evaluate_calibration(targets, std::exp(c), grid_steps);
    } else {
      a = c;
      c = d;
      pc = pd;
      d = a + ratio * (b - a);
      pd = evaluate_calibration(targets, std::exp(d), grid_steps);
    }
  }
  return pc.worst <= pd.worst ? pc : pd;
}

}  // namespace nap
