#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nap/ancillary.hpp"
#include "nap/linalg.hpp"
#include "nap/schedules.hpp"
#include "nap/time_grid.hpp"

namespace nap {

// Detuning law. Cotangent is the form that satisfies the passage conditions; PrintedCosine
// keeps cos(2 phi) in place of cot(2 phi) and exists only to be checked against it.
enum class DetuningForm { Cotangent, PrintedCosine };

// Which angle drives the dark-state conversion envelope.
enum class ConversionReading { AssistantAngle, WorkingAngle };

struct SynthesisOptions {
  std::size_t grid_steps = 2000;  // resolution of the singularity scan
  DetuningForm detuning = DetuningForm::Cotangent;
  std::optional<std::size_t> converted_assistant;
  ConversionReading reading = ConversionReading::AssistantAngle;
  double detuning_offset = 0.0;  // perturbation fixture, zero in normal use
};

struct AuxiliarySample {
  std::size_t target = 0;  // the converted index m; the field couples |e_{m+1}>
  double detuning = 0.0;
  double envelope = 0.0;
  std::vector<double> rabi;   // omega_n for n = 0..m
  std::vector<double> phase;  // Phi_n for n = 0..m
};

// Field that rotates the assistant frame about b~_{m-1} and |e_{m+1}>.
class AuxiliaryDrive {
 public:
  AuxiliaryDrive(SubspaceLayout layout, ScheduleSet schedules, std::size_t target, ConversionReading reading);

  AuxiliarySample sample(double t) const;
  ComplexMatrix hamiltonian(double t) const;
  std::size_t target() const { return target_; }
  ConversionReading reading() const { return reading_; }

 private:
  SubspaceLayout layout_;
  ScheduleSet schedules_;
  std::size_t target_;
  ConversionReading reading_;
};

AuxiliaryDrive convert_dark_state(const SubspaceLayout& layout, const ScheduleSet& schedules, std::size_t m,
                                  ConversionReading reading = ConversionReading::AssistantAngle);

struct DriveSample {
  double time = 0.0;
  double envelope = 0.0;     // Omega
  double drive_phase = 0.0;  // varphi
  double detuning = 0.0;     // Delta
  Eigen::MatrixXd rabi;      // M x N, entry (m, n) couples |e_m> and |n>
  Eigen::MatrixXd phase;
  std::optional<AuxiliarySample> auxiliary;

  // Rabi * e^{i phase}: the <e_m|H|n> element.
  ComplexMatrix couplings() const;
};

class DrivePlan {
 public:
  DrivePlan(SubspaceLayout layout, ScheduleSet schedules, SynthesisOptions options);

  DriveSample sample(double t) const;
  ComplexMatrix hamiltonian(double t) const;
  std::vector<DriveSample> tabulate(const TimeGrid& grid) const;
  // Largest ||H(t)||_F over the grid.
  double hamiltonian_scale(const TimeGrid& grid) const;

  const SubspaceLayout& layout() const { return layout_; }
  const ScheduleSet& schedules() const { return schedules_; }
  const SynthesisOptions& options() const { return options_; }
  const std::optional<AuxiliaryDrive>& auxiliary() const { return auxiliary_; }
  double duration() const { return schedules_.duration(); }

 private:
  SubspaceLayout layout_;
  ScheduleSet schedules_;
  SynthesisOptions options_;
  std::optional<AuxiliaryDrive> auxiliary_;
};

DrivePlan synthesize_general(const SubspaceLayout& layout, const ScheduleSet& schedules,
                             const SynthesisOptions& options = {});

// Accumulated phases f_k(t) in frame column order.
struct GeneratedPhases {
  TimeGrid grid;
  std::vector<std::vector<double>> values;  // [k][i]

  double at(std::size_t k, std::size_t i) const { return values.at(k).at(i); }
  double final(std::size_t k) const { return values.at(k).back(); }
};

GeneratedPhases generated_phases(const DrivePlan& plan, const TimeGrid& grid);

struct ReductionReport {
  std::size_t assistant = 0;
  std::size_t working = 0;
  double consistent_difference = 0.0;  // special case with product limit N-2 versus general
  double printed_difference = 0.0;     // special case with product limit N-1
  double consistent_residual = 0.0;    // relative
  double printed_residual = 0.0;
  bool limits_disagree = false;
  std::string resolution;
};

// Compares the one- and two-assistant closed forms with the general synthesis.
// `phantom_angle` stands in for the undefined theta_{N-1} of the N-1 product limit.
ReductionReport reduction_crosscheck(const SubspaceLayout& layout, const ScheduleSet& schedules,
                                     double phantom_angle = 1.0471975511965976, std::size_t samples = 50);

// Gridded Delta, Omega, varphi and every Rabi/phase entry with a header row.
void write_drive_csv(std::ostream& out, const DrivePlan& plan, const TimeGrid& grid);

std::string format_number(double x);

}  // namespace nap
