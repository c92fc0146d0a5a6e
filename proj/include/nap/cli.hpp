#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nap/verify.hpp"

namespace nap::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kDiagnosticFailure = 1, kUsageError = 2 };

struct CommonOptions {
  std::optional<std::string> out;
  std::optional<std::size_t> grid;
  std::size_t jobs = 0;  // 0 selects the available parallelism
};

int cmd_run(const std::string& config_path, const CommonOptions& options, std::ostream& out, std::ostream& err);

// Parameters: kappa_T, kappa_over_omega, omega_T, grid.
int cmd_sweep(const std::string& config_path, const std::string& parameter, const std::vector<double>& values,
              const CommonOptions& options, std::ostream& out, std::ostream& err);

int cmd_verify(const VerifyOptions& verify, const std::optional<std::string>& out_dir, std::ostream& out,
               std::ostream& err);

std::vector<double> parse_values(const std::string& text);
// "1x2,2x3" -> {(1,2), (2,3)}; an empty string gives an empty list.
std::vector<std::pair<std::size_t, std::size_t>> parse_sizes(const std::string& text);

// Runs fn(0..count-1) on `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace nap::cli
