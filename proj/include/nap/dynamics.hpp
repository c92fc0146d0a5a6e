#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nap/ancillary.hpp"
#include "nap/linalg.hpp"
#include "nap/synthesis.hpp"
#include "nap/time_grid.hpp"

namespace nap {

using HamiltonianFn = std::function<ComplexMatrix(double)>;
using ProjectorFn = std::function<ComplexMatrix(double)>;

struct Dissipator {
  ComplexMatrix jump;
  double rate = 0.0;
};

struct StateTrajectory {
  TimeGrid grid;
  std::vector<StateVector> states;
  double max_norm_drift = 0.0;
};

struct DensityTrajectory {
  TimeGrid grid;
  std::vector<DensityMatrix> states;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 1.0;
};

// Midpoint exponential integrator; checks Hermiticity of every sampled H.
StateTrajectory propagate_schrodinger(const HamiltonianFn& hamiltonian, const StateVector& initial,
                                      const TimeGrid& grid);

struct LindbladOptions {
  std::size_t eigenvalue_stride = 50;  // steps between positivity checks
};

// Classical RK4 on the master equation with the state re-symmetrized after each step.
DensityTrajectory propagate_lindblad(const HamiltonianFn& hamiltonian, std::span<const Dissipator> dissipators,
                                     const DensityMatrix& initial, const TimeGrid& grid,
                                     const LindbladOptions& options = {});

// ||dPi/dt + i[H, Pi]||_F with a centred difference of step h.
double von_neumann_residual(const ProjectorFn& projector_at, const HamiltonianFn& hamiltonian, double t, double h);
// Same quantity for Pi = |mu><mu| with an analytic derivative.
double von_neumann_residual(const StateVector& base, const StateVector& derivative, const ComplexMatrix& hamiltonian);

struct FactorMatrices {
  ComplexMatrix geometric;  // G_kn = i <mu_k | d mu_n / dt>
  ComplexMatrix dynamical;  // D_kn = <mu_k | H | mu_n>
};

FactorMatrices gd_matrices(const AncillaryFrame& frame, const ComplexMatrix& hamiltonian);

// U(t_i) = sum_k e^{i f_k(t_i)} |mu_k(t_i)><mu_k(t_0)| for frames sampled on the phase grid.
std::vector<ComplexMatrix> reconstruct_evolution(std::span<const AncillaryFrame> frames,
                                                 const GeneratedPhases& phases);

struct PopulationLabel {
  std::string name;
  std::size_t index = 0;
};

struct Diagnostics {
  double max_residual = 0.0;  // relative to the Hamiltonian scale
  double norm_drift = 0.0;
  double trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  bool open_system = false;
  bool residual_checked = true;

  bool within_thresholds() const;
};

struct SimulationResult {
  std::vector<double> times;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> populations;  // [label][i]
  std::vector<double> fidelity;
  std::vector<double> residual;
  DensityMatrix final_state;
  std::vector<double> step_fidelities;
  double final_fidelity = 0.0;
  Diagnostics diagnostics;

  const std::vector<double>& population(const std::string& label) const;
};

SimulationResult metrics(const StateTrajectory& trajectory, const StateVector& target,
                         std::span<const PopulationLabel> labels);
SimulationResult metrics(const DensityTrajectory& trajectory, const StateVector& target,
                         std::span<const PopulationLabel> labels);

// Columns t, P_<label>..., F, residual with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const SimulationResult& result);

}  // namespace nap
