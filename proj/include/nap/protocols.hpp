#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nap/ancillary.hpp"
#include "nap/dynamics.hpp"
#include "nap/linalg.hpp"
#include "nap/schedules.hpp"
#include "nap/synthesis.hpp"

namespace nap {

enum class HamiltonianMode { Effective, RotatingFrame };

// Drive frequency omega_0 relative to the bare qubit frequency: -omega + J, -omega, -omega - J.
enum class DriveFrequencyRule { AboveByCoupling, Bare, BelowByCoupling };

enum class Passage { Lower, Upper };  // mu_{N-1} or mu_N

// Step-1 relative phase: alpha = 0 (Caption) or alpha = pi (Text); both reach the same target.
enum class BoundaryChoice { Caption, Text };

// Frequencies and rates in units of 1/T where T is the step duration.
struct QubitModel {
  std::size_t count = 2;
  std::optional<double> omega_T;  // required by the rotating-frame mode
  double coupling_ratio = 0.1;    // J / omega
  double kappa_T = 0.0;

  double coupling_T() const;
  void validate() const;
};

struct ProtocolStep {
  std::string name;
  double duration = 1.0;
  SubspaceLayout layout;
  std::vector<std::size_t> embedding;  // layout level -> product-basis index
  ScheduleSet schedules{1, 2, 1.0};
  DriveFrequencyRule rule = DriveFrequencyRule::Bare;
  std::vector<std::pair<std::size_t, std::size_t>> couplings;
  std::vector<std::size_t> driven;
  Passage passage = Passage::Lower;
  StateVector initial;
  StateVector target;
  StateVector nominal_final;
  std::shared_ptr<const DrivePlan> plan;

  struct Witness {
    std::size_t qubit;
    std::size_t assistant;  // layout level
    std::size_t working;    // layout level
  };
  std::vector<Witness> witnesses;
};

struct ProtocolPlan {
  std::string name;
  std::size_t qubits = 2;
  std::vector<ProtocolStep> steps;
  StateVector initial;
  StateVector target;
  std::vector<PopulationLabel> labels;  // sorted by name
};

// Qubit 0 is the leftmost character and the most significant bit; 'e' sets the bit.
std::size_t product_index(std::string_view label);
std::string product_label(std::size_t index, std::size_t count);
StateVector product_state(std::string_view label);
StateVector superposition(std::string_view a, Complex ca, std::string_view b, Complex cb);

// Complex single-qubit drive amplitudes d_q(t); zero for undriven qubits.
std::vector<Complex> qubit_drive_amplitudes(const ProtocolStep& step, std::size_t qubits, double t);

ComplexMatrix build_step_hamiltonian(const ProtocolStep& step, const QubitModel& model, double t,
                                     HamiltonianMode mode = HamiltonianMode::Effective);

// Per-step schedule replacements keyed by 1-based step number.
using ScheduleOverrides = std::map<std::size_t, std::map<std::string, ParameterSchedule>>;

ProtocolPlan plan_bell(double T = 1.0, BoundaryChoice boundary = BoundaryChoice::Caption,
                       std::size_t grid_steps = 2000, const ScheduleOverrides& overrides = {});
// The double-excitation Bell state converted back to the single-excitation one.
ProtocolPlan plan_bell_reverse(double T = 1.0, std::size_t grid_steps = 2000,
                               const ScheduleOverrides& overrides = {});
ProtocolPlan plan_ghz(std::size_t qubits, double T = 1.0, std::size_t grid_steps = 2000,
                      const ScheduleOverrides& overrides = {});

struct RunOptions {
  HamiltonianMode mode = HamiltonianMode::Effective;
  std::size_t grid_steps = 2000;  // per protocol step
  bool enforce_strong_coupling = true;
  bool force_density = false;  // Lindblad propagation even without decay
  std::optional<std::size_t> last_step;  // run only steps 1..last_step
};

SimulationResult run_protocol(const ProtocolPlan& plan, const QubitModel& model, const RunOptions& options = {});

}  // namespace nap
