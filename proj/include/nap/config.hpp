#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nap/protocols.hpp"

namespace nap {

struct RunConfig {
  std::string source;
  std::string protocol;  // bell, bell-reverse or ghz
  std::size_t qubits = 2;
  HamiltonianMode mode = HamiltonianMode::Effective;
  double duration = 1.0;
  std::size_t grid = 2000;
  BoundaryChoice boundary = BoundaryChoice::Caption;
  std::vector<double> kappa_T{0.0};
  std::optional<std::vector<double>> kappa_over_omega;  // converted with omega_T when given
  std::optional<double> omega_T;
  double coupling_ratio = 0.1;
  std::string output = "nap_out";
  std::uint64_t seed = 1;
  ScheduleOverrides overrides;
  nlohmann::json echo;
};

// Parses and validates; errors carry "<source>:<line>: ".
RunConfig parse_config(const std::string& text, const std::string& source);
RunConfig load_config(const std::string& path);

ProtocolPlan build_plan(const RunConfig& config);
QubitModel model_for(const RunConfig& config, double kappa_T);

}  // namespace nap
