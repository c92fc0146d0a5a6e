#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nap/ancillary.hpp"
#include "nap/schedules.hpp"

namespace nap {

struct RandomInstance {
  SubspaceLayout layout;
  ScheduleSet schedules;
};

// Static random angles and phases with a cosine-ramp mixing angle kept clear of the drive singularities.
RandomInstance random_instance(std::mt19937_64& rng, std::size_t assistant, std::size_t working, double duration = 1.0);

// As random_instance, with theta~_m and alpha~_m made smooth functions of time.
RandomInstance random_conversion_instance(std::mt19937_64& rng, std::size_t assistant, std::size_t working,
                                          std::size_t m, double duration = 1.0);

struct SuiteReport {
  std::string name;
  std::size_t instances = 0;
  double max_error = 0.0;
  double threshold = 0.0;
  bool passed = true;
  std::vector<std::string> notes;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::vector<std::pair<std::size_t, std::size_t>> sizes;  // (M, N)
  std::size_t residual_instances = 50;
  std::size_t reconstruction_instances = 20;
  std::size_t conversion_instances = 10;
  std::size_t sample_times = 100;
  double detuning_offset = 0.0;  // perturbation fixture
};

// All (M, N) with 1 <= M <= max_m and 2 <= N <= max_n.
std::vector<std::pair<std::size_t, std::size_t>> size_range(std::size_t max_m, std::size_t max_n);

std::vector<SuiteReport> run_verification(const VerifyOptions& options);

bool all_passed(const std::vector<SuiteReport>& reports);
void print_report(std::ostream& out, const std::vector<SuiteReport>& reports);

}  // namespace nap
