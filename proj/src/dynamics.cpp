#include "nap/dynamics.hpp"

#include <cmath>

#include "nap/errors.hpp"
#include "nap/tolerances.hpp"

namespace nap {

namespace {

void check_hamiltonian(const ComplexMatrix& h, Eigen::Index dim, double t) {
  if (h.rows() != dim || h.cols() != dim) {
    throw DimensionError("Hamiltonian dimension does not match the state");
  }
  if (!is_hermitian(h, tol::kHamiltonianHermitian)) {
    throw DiagnosticError("Hamiltonian is not Hermitian at t = " + std::to_string(t));
  }
}

}  // namespace

StateTrajectory propagate_schrodinger(const HamiltonianFn& hamiltonian, const StateVector& initial,
                                      const TimeGrid& grid) {
  grid.validate();
  StateTrajectory out;
  out.grid = grid;
  out.states.reserve(grid.points());
  out.states.push_back(initial);
  const double norm0 = initial.norm();
  StateVector psi = initial;
  for (std::size_t i = 0; i < grid.steps; ++i) {
    const double t0 = grid.time(i);
    const double dt = grid.time(i + 1) - t0;
    const ComplexMatrix h = hamiltonian(t0 + 0.5 * dt);
    check_hamiltonian(h, psi.size(), t0 + 0.5 * dt);
    psi = expm_apply(h, -kI * dt, psi);
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(psi.norm() - norm0));
    out.states.push_back(psi);
  }
  return out;
}

DensityTrajectory propagate_lindblad(const HamiltonianFn& hamiltonian, std::span<const Dissipator> dissipators,
                                     const DensityMatrix& initial, const TimeGrid& grid,
                                     const LindbladOptions& options) {
  grid.validate();
  const Eigen::Index dim = initial.rows();
  if (initial.cols() != dim) {
    throw DimensionError("density matrix is not square");
  }
  // Jump operators are kept as nonzero triplets; decay operators have a handful of entries.
  struct Entry {
    Eigen::Index row, col;
    Complex value;
  };
  std::vector<std::vector<Entry>> jumps;
  ComplexMatrix anti = ComplexMatrix::Zero(dim, dim);
  for (const Dissipator& d : dissipators) {
    if (d.jump.rows() != dim || d.jump.cols() != dim) {
      throw DimensionError("jump operator dimension does not match the state");
    }
    if (d.rate < 0.0) {
      throw DomainError("dissipation rate must be non-negative");
    }
    const ComplexMatrix l = std::sqrt(d.rate) * d.jump;
    std::vector<Entry> entries;
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (Eigen::Index r = 0; r < dim; ++r) {
        if (l(r, c) != Complex{0.0, 0.0}) {
          entries.push_back({r, c, l(r, c)});
        }
      }
    }
    jumps.push_back(std::move(entries));
    anti += 0.5 * l.adjoint() * l;
  }
  // -i[H, rho] - {A, rho} = -i (K rho - rho K^dagger) with K = H - iA.
  auto rhs = [&](const ComplexMatrix& k, const DensityMatrix& rho) {
    ComplexMatrix kr = k * rho;
    ComplexMatrix out = -kI * (kr - kr.adjoint());
    for (const auto& entries : jumps) {
      for (const Entry& a : entries) {
        for (const Entry& b : entries) {
          out(a.row, b.row) += a.value * rho(a.col, b.col) * std::conj(b.value);
        }
      }
    }
    return out;
  };
  DensityTrajectory out;
  out.grid = grid;
  out.states.reserve(grid.points());
  out.states.push_back(initial);
  out.min_eigenvalue = min_eigenvalue(initial);
  const double trace0 = initial.trace().real();
  DensityMatrix rho = initial;
  const std::size_t stride = std::max<std::size_t>(1, options.eigenvalue_stride);
  for (std::size_t i = 0; i < grid.steps; ++i) {
    const double t0 = grid.time(i);
    const double dt = grid.time(i + 1) - t0;
    const ComplexMatrix hm = hamiltonian(t0 + 0.5 * dt);
    check_hamiltonian(hm, dim, t0 + 0.5 * dt);
    const ComplexMatrix h0 = hamiltonian(t0) - kI * anti;
    const ComplexMatrix h1 = hamiltonian(t0 + dt) - kI * anti;
    const ComplexMatrix km = hm - kI * anti;
    const ComplexMatrix k1 = rhs(h0, rho);
    const ComplexMatrix k2 = rhs(km, rho + 0.5 * dt * k1);
    const ComplexMatrix k3 = rhs(km, rho + 0.5 * dt * k2);
    const ComplexMatrix k4 = rhs(h1, rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double drift = std::abs(rho.trace().real() - trace0);
    out.max_trace_drift = std::max(out.max_trace_drift, drift);
    if (drift > tol::kTraceDriftFatal) {
      throw DiagnosticError("trace drift " + std::to_string(drift) + " at t = " + std::to_string(t0 + dt) +
                            "; step size too coarse");
    }
    if ((i + 1) % stride == 0 || i + 1 == grid.steps) {
      out.min_eigenvalue = std::min(out.min_eigenvalue, min_eigenvalue(rho));
    }
    out.states.push_back(rho);
  }
  return out;
}

double von_neumann_residual(const ProjectorFn& projector_at, const HamiltonianFn& hamiltonian, double t, double h) {
  if (!(h > 0.0)) {
    throw DomainError("finite-difference step must be positive");
  }
  const ComplexMatrix p = projector_at(t);
  const ComplexMatrix hm = hamiltonian(t);
  if (hm.rows() != p.rows() || hm.cols() != p.cols()) {
    throw DimensionError("projector and Hamiltonian dimensions differ");
  }
  const ComplexMatrix dp = (projector_at(t + h) - projector_at(t - h)) / (2.0 * h);
  return (dp + kI * commutator(hm, p)).norm();
}

double von_neumann_residual(const StateVector& base, const StateVector& derivative, const ComplexMatrix& hamiltonian) {
  if (hamiltonian.rows() != base.size() || derivative.size() != base.size()) {
    throw DimensionError("projector and Hamiltonian dimensions differ");
  }
  // dP/dt + i[H, P] = a mu^dagger + mu a^dagger with a = d mu/dt + i H mu.
  const StateVector a = derivative + kI * (hamiltonian * base);
  return (a * base.adjoint() + base * a.adjoint()).norm();
}

FactorMatrices gd_matrices(const AncillaryFrame& frame, const ComplexMatrix& hamiltonian) {
  if (hamiltonian.rows() != frame.bases.rows() || hamiltonian.cols() != frame.bases.rows()) {
    throw DimensionError("Hamiltonian does not match the frame dimension");
  }
  return {kI * frame.bases.adjoint() * frame.derivatives, frame.bases.adjoint() * hamiltonian * frame.bases};
}

std::vector<ComplexMatrix> reconstruct_evolution(std::span<const AncillaryFrame> frames,
                                                 const GeneratedPhases& phases) {
  if (frames.size() != phases.grid.points()) {
    throw DimensionError("frame trajectory and phase grid have different lengths");
  }
  if (frames.empty()) {
    return {};
  }
  const ComplexMatrix& initial = frames.front().bases;
  if (phases.values.size() != static_cast<std::size_t>(initial.cols())) {
    throw DimensionError("phase table does not match the frame size");
  }
  std::vector<ComplexMatrix> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (std::abs(frames[i].time - phases.grid.time(i)) > 1e-9 * std::max(1.0, std::abs(phases.grid.stop))) {
      throw DimensionError("frame times do not match the phase grid");
    }
    ComplexMatrix d = ComplexMatrix::Zero(initial.cols(), initial.cols());
    for (Eigen::Index k = 0; k < initial.cols(); ++k) {
      d(k, k) = std::exp(kI * phases.values[static_cast<std::size_t>(k)][i]);
    }
    out.push_back(frames[i].bases * d * initial.adjoint());
  }
  return out;
}

bool Diagnostics::within_thresholds() const {
  if (residual_checked && max_residual > tol::kResidual) {
    return false;
  }
  if (open_system) {
    return trace_drift <= tol::kTraceDrift && min_eigenvalue >= -tol::kPositivity;
  }
  return norm_drift <= tol::kNormDrift;
}

const std::vector<double>& SimulationResult::population(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) {
      return populations[i];
    }
  }
  throw MissingSymbolError("no population column '" + label + "'");
}

namespace {

template <typename State, typename Pop>
SimulationResult collect(const TimeGrid& grid, const std::vector<State>& states, const StateVector& target,
                         std::span<const PopulationLabel> labels, Pop population) {
  SimulationResult r;
  const Eigen::Index dim = states.front().rows();
  if (target.size() != dim) {
    throw DimensionError("target state dimension does not match the trajectory");
  }
  for (const PopulationLabel& l : labels) {
    if (static_cast<Eigen::Index>(l.index) >= dim) {
      throw DimensionError("population label '" + l.name + "' is outside the state dimension");
    }
    r.labels.push_back(l.name);
  }
  r.populations.assign(labels.size(), {});
  for (std::size_t i = 0; i < states.size(); ++i) {
    r.times.push_back(grid.time(i));
    for (std::size_t l = 0; l < labels.size(); ++l) {
      r.populations[l].push_back(population(states[i], static_cast<Eigen::Index>(labels[l].index)));
    }
    r.fidelity.push_back(fidelity(target, states[i]));
  }
  r.residual.assign(states.size(), 0.0);
  r.final_fidelity = r.fidelity.back();
  return r;
}

}  // namespace

SimulationResult metrics(const StateTrajectory& trajectory, const StateVector& target,
                         std::span<const PopulationLabel> labels) {
  if (trajectory.states.empty()) {
    throw DimensionError("empty trajectory");
  }
  SimulationResult r = collect(trajectory.grid, trajectory.states, target, labels,
                               [](const StateVector& s, Eigen::Index k) { return std::norm(s(k)); });
  r.final_state = projector(trajectory.states.back());
  r.diagnostics.norm_drift = trajectory.max_norm_drift;
  r.diagnostics.min_eigenvalue = 0.0;
  return r;
}

SimulationResult metrics(const DensityTrajectory& trajectory, const StateVector& target,
                         std::span<const PopulationLabel> labels) {
  if (trajectory.states.empty()) {
    throw DimensionError("empty trajectory");
  }
  SimulationResult r = collect(trajectory.grid, trajectory.states, target, labels,
                               [](const DensityMatrix& s, Eigen::Index k) { return s(k, k).real(); });
  r.final_state = trajectory.states.back();
  r.diagnostics.open_system = true;
  r.diagnostics.trace_drift = trajectory.max_trace_drift;
  r.diagnostics.min_eigenvalue = trajectory.min_eigenvalue;
  return r;
}

void write_trajectory_csv(std::ostream& out, const SimulationResult& result) {
  out << "t";
  for (const std::string& l : result.labels) {
    out << ",P_" << l;
  }
  out << ",F,residual\n";
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    out << format_number(result.times[i]);
    for (const auto& p : result.populations) {
      out << ',' << format_number(p[i]);
    }
    out << ',' << format_number(result.fidelity[i]) << ',' << format_number(result.residual[i]) << '\n';
  }
}

}  // namespace nap
