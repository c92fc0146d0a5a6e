#include "nap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "nap/config.hpp"
#include "nap/errors.hpp"
#include "nap/protocols.hpp"

namespace nap::cli {

namespace fs = std::filesystem;

namespace {

struct RunRecord {
  double kappa_T = 0.0;
  std::optional<SimulationResult> result;
  std::string error;
  std::string csv;
};

nlohmann::json diagnostics_json(const Diagnostics& d) {
  return {{"max_residual", d.max_residual},     {"norm_drift", d.norm_drift},
          {"trace_drift", d.trace_drift},       {"min_eigenvalue", d.min_eigenvalue},
          {"open_system", d.open_system},       {"residual_checked", d.residual_checked},
          {"within_thresholds", d.within_thresholds()}};
}

RunOptions run_options(const RunConfig& c) {
  RunOptions o;
  o.mode = c.mode;
  o.grid_steps = c.grid;
  return o;
}

// Executes one run per kappa_T; the first DiagnosticError of a run is recorded rather than thrown.
std::vector<RunRecord> execute(const RunConfig& config, const ProtocolPlan& plan, const std::vector<double>& kappas,
                               std::size_t jobs) {
  std::vector<RunRecord> records(kappas.size());
  parallel_for(kappas.size(), jobs, [&](std::size_t i) {
    records[i].kappa_T = kappas[i];
    try {
      records[i].result = run_protocol(plan, model_for(config, kappas[i]), run_options(config));
    } catch (const std::exception& e) {
      records[i].error = e.what();
    }
  });
  return records;
}

template <typename Fn>
int guarded(std::ostream& err, Fn fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DiagnosticError& e) {
    err << "diagnostic failure: " << e.what() << '\n';
    return kDiagnosticFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) {
    jobs = std::max(1U, std::thread::hardware_concurrency());
  }
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& w : workers) {
    w.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) {
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw Error("invalid number '" + item + "' in value list");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_sizes(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) {
      continue;
    }
    const auto x = item.find('x');
    try {
      if (x == std::string::npos) {
        throw Error("");
      }
      out.emplace_back(std::stoul(item.substr(0, x)), std::stoul(item.substr(x + 1)));
    } catch (const std::exception&) {
      throw Error("size '" + item + "' is not of the form MxN");
    }
    if (out.back().first < 1 || out.back().second < 2) {
      throw Error("size '" + item + "' needs M >= 1 and N >= 2");
    }
  }
  return out;
}

int cmd_run(const std::string& config_path, const CommonOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = std::chrono::steady_clock::now();
    RunConfig config = load_config(config_path);
    if (options.grid) {
      config.grid = *options.grid;
    }
    if (options.out) {
      config.output = *options.out;
    }
    const ProtocolPlan plan = build_plan(config);
    std::vector<RunRecord> records = execute(config, plan, config.kappa_T, options.jobs);

    fs::create_directories(config.output);
    nlohmann::json runs = nlohmann::json::array();
    bool ok = true;
    for (std::size_t i = 0; i < records.size(); ++i) {
      RunRecord& r = records[i];
      nlohmann::json entry{{"index", i}, {"kappa_T", r.kappa_T}};
      if (r.result) {
        r.csv = config.protocol + "_run" + std::to_string(i) + ".csv";
        std::ofstream csv(fs::path(config.output) / r.csv, std::ios::binary);
        write_trajectory_csv(csv, *r.result);
        entry["final_fidelity"] = r.result->final_fidelity;
        entry["step_fidelities"] = r.result->step_fidelities;
        entry["diagnostics"] = diagnostics_json(r.result->diagnostics);
        entry["csv"] = r.csv;
        ok = ok && r.result->diagnostics.within_thresholds();
        out << "run " << i << ": kappa_T=" << format_number(r.kappa_T)
            << " final_fidelity=" << format_number(r.result->final_fidelity)
            << (r.result->diagnostics.within_thresholds() ? "" : " (diagnostics out of range)") << '\n';
      } else {
        entry["error"] = r.error;
        ok = false;
        err << "run " << i << " failed: " << r.error << '\n';
      }
      runs.push_back(entry);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nlohmann::json manifest{{"config", config.echo}, {"runs", runs}, {"version", kVersion}, {"duration_seconds", seconds}};
    std::ofstream(fs::path(config.output) / "manifest.json") << manifest.dump(2) << '\n';
    return ok ? kOk : kDiagnosticFailure;
  });
}

int cmd_sweep(const std::string& config_path, const std::string& parameter, const std::vector<double>& values,
              const CommonOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    static const std::vector<std::string> sweepable{"kappa_T", "kappa_over_omega", "omega_T", "grid"};
    if (std::find(sweepable.begin(), sweepable.end(), parameter) == sweepable.end()) {
      throw Error("unknown sweep parameter '" + parameter + "' (use kappa_T, kappa_over_omega, omega_T or grid)");
    }
    if (values.empty()) {
      throw Error("sweep needs at least one value");
    }
    RunConfig base = load_config(config_path);
    if (options.grid) {
      base.grid = *options.grid;
    }
    if (options.out) {
      base.output = *options.out;
    }
    if (parameter == "kappa_over_omega" && !base.omega_T) {
      throw Error("sweeping kappa_over_omega needs omega_T in the configuration");
    }
    const double base_ratio = base.kappa_over_omega ? base.kappa_over_omega->front() : 0.0;

    std::vector<std::optional<SimulationResult>> results(values.size());
    std::vector<std::string> errors(values.size());
    parallel_for(values.size(), options.jobs, [&](std::size_t i) {
      RunConfig c = base;
      double kappa = base.kappa_T.front();
      const double v = values[i];
      if (parameter == "kappa_T") {
        kappa = v;
      } else if (parameter == "kappa_over_omega") {
        kappa = v * *c.omega_T;
      } else if (parameter == "omega_T") {
        c.omega_T = v;
        if (c.kappa_over_omega) {
          kappa = base_ratio * v;
        }
      } else {
        c.grid = static_cast<std::size_t>(v);
      }
      try {
        if (kappa < 0.0 || (parameter == "grid" && v < 1.0) || (parameter == "omega_T" && !(v > 0.0))) {
          throw Error("sweep value out of range");
        }
        results[i] = run_protocol(build_plan(c), model_for(c, kappa), run_options(c));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });

    std::ostringstream table;
    std::size_t steps = 0;
    for (const auto& r : results) {
      if (r) {
        steps = std::max(steps, r->step_fidelities.size());
      }
    }
    table << parameter << ",final_fidelity";
    for (std::size_t s = 0; s < steps; ++s) {
      table << ",step_" << s + 1 << "_fidelity";
    }
    table << ",max_residual\n";
    bool ok = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!results[i]) {
        err << "value " << values[i] << " failed: " << errors[i] << '\n';
        ok = false;
        continue;
      }
      const SimulationResult& r = *results[i];
      table << format_number(values[i]) << ',' << format_number(r.final_fidelity);
      for (std::size_t s = 0; s < steps; ++s) {
        table << ',' << (s < r.step_fidelities.size() ? format_number(r.step_fidelities[s]) : "");
      }
      table << ',' << format_number(r.diagnostics.max_residual) << '\n';
      ok = ok && r.diagnostics.within_thresholds();
    }
    if (ok && (parameter == "kappa_T" || parameter == "kappa_over_omega")) {
      std::vector<std::size_t> order(values.size());
      for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
      }
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      for (std::size_t i = 1; i < order.size(); ++i) {
        if (results[order[i]]->final_fidelity > results[order[i - 1]]->final_fidelity + 1e-12) {
          err << "fidelity increases with the decay rate between " << values[order[i - 1]] << " and "
              << values[order[i]] << '\n';
          ok = false;
        }
      }
    }
    fs::create_directories(base.output);
    std::ofstream(fs::path(base.output) / ("sweep_" + parameter + ".csv"), std::ios::binary) << table.str();
    out << table.str();
    return ok ? kOk : kDiagnosticFailure;
  });
}

int cmd_verify(const VerifyOptions& verify, const std::optional<std::string>& out_dir, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<SuiteReport> reports = run_verification(verify);
    print_report(out, reports);
    if (out_dir) {
      nlohmann::json suites = nlohmann::json::array();
      for (const SuiteReport& r : reports) {
        suites.push_back({{"name", r.name},
                          {"instances", r.instances},
                          {"max_error", r.max_error},
                          {"threshold", r.threshold},
                          {"passed", r.passed},
                          {"notes", r.notes}});
      }
      fs::create_directories(*out_dir);
      std::ofstream(fs::path(*out_dir) / "verify.json")
          << nlohmann::json{{"seed", verify.seed}, {"suites", suites}, {"version", kVersion}}.dump(2) << '\n';
    }
    return all_passed(reports) ? kOk : kDiagnosticFailure;
  });
}

}  // namespace nap::cli
