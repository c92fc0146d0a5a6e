#include "nap/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "nap/errors.hpp"
#include "nap/tolerances.hpp"

namespace nap {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t bit(std::size_t index, std::size_t qubit, std::size_t count) { return (index >> (count - 1 - qubit)) & 1U; }

std::size_t mask(std::size_t qubit, std::size_t count) { return std::size_t{1} << (count - 1 - qubit); }

std::string pattern(std::size_t excited_prefix, std::size_t count) {
  std::string s(count, 'g');
  std::fill_n(s.begin(), std::min(excited_prefix, count), 'e');
  return s;
}

int rule_offset(DriveFrequencyRule rule) {
  switch (rule) {
    case DriveFrequencyRule::AboveByCoupling:
      return 1;
    case DriveFrequencyRule::Bare:
      return 0;
    case DriveFrequencyRule::BelowByCoupling:
      return -1;
  }
  return 0;
}

// Layout-to-product isometry.
ComplexMatrix embedding_matrix(const ProtocolStep& step, std::size_t qubits) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  ComplexMatrix e = ComplexMatrix::Zero(dim, static_cast<Eigen::Index>(step.embedding.size()));
  for (std::size_t k = 0; k < step.embedding.size(); ++k) {
    e(static_cast<Eigen::Index>(step.embedding[k]), static_cast<Eigen::Index>(k)) = 1.0;
  }
  return e;
}

std::size_t passage_index(const ProtocolStep& step) {
  const std::size_t K = step.layout.dimension();
  return step.passage == Passage::Lower ? K - 2 : K - 1;
}

void apply_overrides(ProtocolStep& step, std::size_t number, const ScheduleOverrides& overrides) {
  auto it = overrides.find(number);
  if (it == overrides.end()) {
    return;
  }
  for (const auto& [name, schedule] : it->second) {
    if (!step.schedules.contains(name)) {
      throw MissingSymbolError("step " + std::to_string(number) + " has no schedule symbol '" + name + "'");
    }
    step.schedules.set(name, schedule);
  }
}

// Synthesizes the drives and checks that the step is realizable by qubit drives and maps its
// declared initial state onto its target.
void finalize_step(ProtocolStep& step, std::size_t qubits, std::size_t grid_steps) {
  const std::size_t dim = std::size_t{1} << qubits;
  if (step.embedding.size() != step.layout.dimension()) {
    throw LayoutError(step.name + ": embedding size does not match the layout");
  }
  std::set<std::size_t> seen;
  for (std::size_t idx : step.embedding) {
    if (idx >= dim || !seen.insert(idx).second) {
      throw LayoutError(step.name + ": embedding is not injective into the product basis");
    }
  }
  SynthesisOptions options;
  options.grid_steps = grid_steps;
  step.plan = std::make_shared<const DrivePlan>(synthesize_general(step.layout, step.schedules, options));

  const std::size_t M = step.layout.assistant;
  step.witnesses.clear();
  for (std::size_t q : step.driven) {
    if (q >= qubits) {
      throw LayoutError(step.name + ": driven qubit out of range");
    }
    bool found = false;
    for (std::size_t a = 0; a < M && !found; ++a) {
      for (std::size_t w = M; w < step.layout.dimension() && !found; ++w) {
        if ((step.embedding[a] ^ step.embedding[w]) == mask(q, qubits)) {
          step.witnesses.push_back({q, a, w});
          found = true;
        }
      }
    }
    if (!found) {
      throw ConstraintError(step.name + ": no layout transition flips driven qubit " + std::to_string(q));
    }
  }

  const QubitModel model{qubits, std::nullopt, 0.1, 0.0};
  const ComplexMatrix e = embedding_matrix(step, qubits);
  const ComplexMatrix outside = ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) -
                                e * e.adjoint();
  const TimeGrid check{0.0, step.duration, 100};
  for (std::size_t i = 0; i < check.points(); ++i) {
    const double t = check.time(i);
    const ComplexMatrix general = step.plan->hamiltonian(t);
    const ComplexMatrix effective = build_step_hamiltonian(step, model, t, HamiltonianMode::Effective);
    const double scale = std::max(1.0, general.cwiseAbs().maxCoeff());
    const double block = (e.adjoint() * effective * e - general).cwiseAbs().maxCoeff();
    const double leak = (outside * effective * e).cwiseAbs().maxCoeff();
    if (block > tol::kRealizability * scale || leak > tol::kRealizability * scale) {
      throw ConstraintError(step.name + ": synthesized drives are not realizable by the qubit drives at t = " +
                            std::to_string(t));
    }
  }

  const TimeGrid grid{0.0, step.duration, grid_steps};
  const GeneratedPhases phases = generated_phases(*step.plan, grid);
  const AncillaryFrame f0 = build_frame(step.layout, step.schedules, 0.0);
  const AncillaryFrame f1 = build_frame(step.layout, step.schedules, step.duration);
  ComplexMatrix d = ComplexMatrix::Zero(f0.bases.cols(), f0.bases.cols());
  for (Eigen::Index k = 0; k < d.rows(); ++k) {
    d(k, k) = std::exp(kI * phases.final(static_cast<std::size_t>(k)));
  }
  const ComplexMatrix u = f1.bases * d * f0.bases.adjoint();
  const StateVector inside = e.adjoint() * step.initial;
  const StateVector rest = step.initial - e * inside;
  if (rest.norm() > 1e-12) {
    for (std::size_t i = 0; i < check.points(); ++i) {
      if ((build_step_hamiltonian(step, model, check.time(i)) * rest).norm() > 1e-12) {
        throw ConstraintError(step.name + ": initial state leaks outside the step layout");
      }
    }
  }
  step.nominal_final = e * (u * inside) + rest;
  const double f = fidelity(step.target, step.nominal_final);
  if (f < 1.0 - tol::kMapping) {
    throw ConstraintError(step.name + ": boundary conditions map the initial state to fidelity " +
                          std::to_string(f) + " with the target");
  }
}

ScheduleSet static_schedules(std::size_t M, std::size_t N, double T) {
  ScheduleSet s(M, N, T);
  for (std::size_t m = 0; m + 1 < M; ++m) {
    s.set(symbol::theta_tilde(m), ParameterSchedule::constant(kPi / 4.0, T));
    s.set(symbol::alpha_tilde(m), ParameterSchedule::constant(0.0, T));
  }
  for (std::size_t n = 0; n + 1 < N; ++n) {
    s.set(symbol::theta(n), ParameterSchedule::constant(kPi / 4.0, T));
    s.set(symbol::alpha(n), ParameterSchedule::constant(0.0, T));
  }
  s.set(symbol::kDrivePhase, ParameterSchedule::constant(kPi / 2.0, T));
  return s;
}

ProtocolStep single_excitation_step(std::size_t qubits, double T, BoundaryChoice boundary) {
  ProtocolStep s;
  s.name = "step1";
  s.duration = T;
  s.layout = {1, 2};
  const std::string ge = "g" + pattern(1, qubits - 1);
  s.embedding = {product_index(pattern(0, qubits)), product_index(pattern(1, qubits)), product_index(ge)};
  s.schedules = static_schedules(1, 2, T);
  s.schedules.set(symbol::kMixing, ParameterSchedule::cosine_ramp(kPi / 2.0, T));
  s.schedules.set(symbol::kRelativePhase,
                  ParameterSchedule::constant(boundary == BoundaryChoice::Caption ? 0.0 : kPi, T));
  s.rule = DriveFrequencyRule::AboveByCoupling;
  s.couplings = {{0, 1}};
  s.driven = {0, 1};
  s.passage = Passage::Lower;
  s.initial = product_state(pattern(0, qubits));
  s.target = superposition(pattern(1, qubits), 1.0, ge, 1.0);
  return s;
}

ProtocolStep conversion_step(std::size_t qubits, double T, bool reverse) {
  ProtocolStep s;
  s.name = reverse ? "reverse" : "step2";
  s.duration = T;
  s.layout = {2, 2};
  const std::string ge = "g" + pattern(1, qubits - 1);
  s.embedding = {product_index(pattern(2, qubits)), product_index(pattern(0, qubits)),
                 product_index(pattern(1, qubits)), product_index(ge)};
  s.schedules = static_schedules(2, 2, T);
  s.schedules.set(symbol::kMixing, ParameterSchedule::cosine_ramp(kPi / 2.0, T, 0.0, reverse ? 0.0 : T));
  s.schedules.set(symbol::kRelativePhase, ParameterSchedule::constant(kPi, T));
  s.rule = DriveFrequencyRule::Bare;
  s.driven = {0, 1};
  s.passage = Passage::Lower;
  const StateVector single = superposition(pattern(1, qubits), 1.0, ge, 1.0);
  const StateVector dbl = superposition(pattern(2, qubits), 1.0, pattern(0, qubits), -1.0);
  s.initial = reverse ? dbl : single;
  s.target = reverse ? single : dbl;
  return s;
}

// Step k >= 3 as a 1+2 system whose second working level |g...g> is a dark bystander.
ProtocolStep ghz_step(std::size_t k, std::size_t qubits, double T) {
  ProtocolStep s;
  s.name = "step" + std::to_string(k);
  s.duration = T;
  s.layout = {1, 2};
  s.embedding = {product_index(pattern(k, qubits)), product_index(pattern(k - 1, qubits)),
                 product_index(pattern(0, qubits))};
  s.schedules = static_schedules(1, 2, T);
  s.schedules.set(symbol::theta(0), ParameterSchedule::constant(kPi / 2.0, T));
  s.schedules.set(symbol::kMixing, ParameterSchedule::cosine_ramp(-kPi / 2.0, T, kPi));
  s.schedules.set(symbol::kRelativePhase, ParameterSchedule::constant(kPi, T));
  s.rule = DriveFrequencyRule::BelowByCoupling;
  s.couplings = {{k - 2, k - 1}};
  s.driven = {k - 1};
  s.passage = Passage::Upper;
  s.initial = superposition(pattern(k - 1, qubits), 1.0, pattern(0, qubits), -1.0);
  s.target = superposition(pattern(k, qubits), 1.0, pattern(0, qubits), -1.0);
  return s;
}

ProtocolPlan assemble_plan(std::string name, std::size_t qubits, std::vector<ProtocolStep> steps,
                           std::size_t grid_steps, const ScheduleOverrides& overrides) {
  for (const auto& [number, _] : overrides) {
    if (number == 0 || number > steps.size()) {
      throw MissingSymbolError("schedule override for nonexistent step " + std::to_string(number));
    }
  }
  ProtocolPlan plan;
  plan.name = std::move(name);
  plan.qubits = qubits;
  std::set<std::size_t> involved;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    apply_overrides(steps[i], i + 1, overrides);
    finalize_step(steps[i], qubits, grid_steps);
    if (i > 0 && fidelity(steps[i].initial, steps[i - 1].target) < 1.0 - 1e-12) {
      throw ConstraintError(steps[i].name + ": initial state differs from the previous target");
    }
    involved.insert(steps[i].embedding.begin(), steps[i].embedding.end());
  }
  plan.initial = steps.front().initial;
  plan.target = steps.back().target;
  plan.steps = std::move(steps);
  for (std::size_t idx : involved) {
    plan.labels.push_back({product_label(idx, qubits), idx});
  }
  std::sort(plan.labels.begin(), plan.labels.end(),
            [](const PopulationLabel& a, const PopulationLabel& b) { return a.name < b.name; });
  return plan;
}

}  // namespace

double QubitModel::coupling_T() const {
  if (!omega_T) {
    throw ConstraintError("rotating-frame mode needs the omega*T scale");
  }
  return coupling_ratio * *omega_T;
}

void QubitModel::validate() const {
  if (count < 2) {
    throw LayoutError("qubit model needs at least two qubits");
  }
  if (kappa_T < 0.0 || coupling_ratio < 0.0) {
    throw DomainError("coupling and decay rates must be non-negative");
  }
  if (omega_T && !(*omega_T > 0.0)) {
    throw DomainError("omega*T must be positive");
  }
}

std::size_t product_index(std::string_view label) {
  if (label.empty() || label.size() > 20) {
    throw LayoutError("product label must hold 1..20 qubits");
  }
  std::size_t index = 0;
  for (char c : label) {
    if (c != 'g' && c != 'e') {
      throw LayoutError("product label may contain only 'g' and 'e'");
    }
    index = (index << 1U) | (c == 'e' ? 1U : 0U);
  }
  return index;
}

std::string product_label(std::size_t index, std::size_t count) {
  std::string s(count, 'g');
  for (std::size_t q = 0; q < count; ++q) {
    if (bit(index, q, count) != 0) {
      s[q] = 'e';
    }
  }
  return s;
}

StateVector product_state(std::string_view label) {
  return basis_vector(static_cast<Eigen::Index>(std::size_t{1} << label.size()),
                      static_cast<Eigen::Index>(product_index(label)));
}

StateVector superposition(std::string_view a, Complex ca, std::string_view b, Complex cb) {
  StateVector v = ca * product_state(a) + cb * product_state(b);
  return v / v.norm();
}

std::vector<Complex> qubit_drive_amplitudes(const ProtocolStep& step, std::size_t qubits, double t) {
  std::vector<Complex> amps(qubits, Complex{0.0, 0.0});
  if (!step.plan) {
    throw ConstraintError(step.name + ": step has no synthesized plan");
  }
  const ComplexMatrix c = step.plan->sample(t).couplings();
  const std::size_t M = step.layout.assistant;
  for (const ProtocolStep::Witness& w : step.witnesses) {
    const Complex value = c(static_cast<Eigen::Index>(w.assistant), static_cast<Eigen::Index>(w.working - M));
    amps[w.qubit] = bit(step.embedding[w.assistant], w.qubit, qubits) != 0 ? value : std::conj(value);
  }
  return amps;
}

ComplexMatrix build_step_hamiltonian(const ProtocolStep& step, const QubitModel& model, double t,
                                     HamiltonianMode mode) {
  const std::size_t n = model.count;
  const std::size_t dim = std::size_t{1} << n;
  double coupling = 0.0;
  if (mode == HamiltonianMode::RotatingFrame) {
    coupling = model.coupling_T() / step.duration;
  }
  const std::vector<Complex> amps = qubit_drive_amplitudes(step, n, t);
  ComplexMatrix h = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t q = 0; q < n; ++q) {
    if (amps[q] == Complex{0.0, 0.0}) {
      continue;
    }
    for (std::size_t x = 0; x < dim; ++x) {
      if (bit(x, q, n) != 0) {
        continue;
      }
      int detune = rule_offset(step.rule);
      for (const auto& [i, j] : step.couplings) {
        if (i == q || j == q) {
          const std::size_t other = i == q ? j : i;
          detune += bit(x, other, n) != 0 ? 1 : -1;
        }
      }
      Complex value = amps[q];
      if (mode == HamiltonianMode::Effective) {
        if (detune != 0) {
          continue;
        }
      } else {
        value *= std::exp(kI * (coupling * detune * t));
      }
      const auto lo = static_cast<Eigen::Index>(x);
      const auto hi = static_cast<Eigen::Index>(x | mask(q, n));
      h(hi, lo) += value;
      h(lo, hi) += std::conj(value);
    }
  }
  return h;
}

ProtocolPlan plan_bell(double T, BoundaryChoice boundary, std::size_t grid_steps, const ScheduleOverrides& overrides) {
  return assemble_plan("bell", 2, {single_excitation_step(2, T, boundary), conversion_step(2, T, false)}, grid_steps,
                       overrides);
}

ProtocolPlan plan_bell_reverse(double T, std::size_t grid_steps, const ScheduleOverrides& overrides) {
  return assemble_plan("bell-reverse", 2, {conversion_step(2, T, true)}, grid_steps, overrides);
}

ProtocolPlan plan_ghz(std::size_t qubits, double T, std::size_t grid_steps, const ScheduleOverrides& overrides) {
  if (qubits < 3) {
    throw LayoutError("GHZ plans need at least three qubits; use the Bell plan for two");
  }
  if (qubits > 12) {
    throw LayoutError("GHZ plans are limited to 12 qubits");
  }
  std::vector<ProtocolStep> steps{single_excitation_step(qubits, T, BoundaryChoice::Caption),
                                  conversion_step(qubits, T, false)};
  for (std::size_t k = 3; k <= qubits; ++k) {
    steps.push_back(ghz_step(k, qubits, T));
  }
  return assemble_plan("ghz", qubits, std::move(steps), grid_steps, overrides);
}

SimulationResult run_protocol(const ProtocolPlan& plan, const QubitModel& model, const RunOptions& options) {
  model.validate();
  if (model.count != plan.qubits) {
    throw DimensionError("qubit model and plan disagree on the qubit count");
  }
  if (options.grid_steps == 0) {
    throw DomainError("grid needs at least one step");
  }
  const std::size_t n = plan.qubits;
  const std::size_t last = std::min(plan.steps.size(), options.last_step.value_or(plan.steps.size()));
  if (last == 0) {
    throw DomainError("nothing to run");
  }
  const bool open = model.kappa_T > 0.0 || options.force_density;

  SimulationResult out;
  for (const PopulationLabel& l : plan.labels) {
    out.labels.push_back(l.name);
  }
  out.populations.assign(plan.labels.size(), {});
  out.diagnostics.open_system = open;
  out.diagnostics.residual_checked = options.mode == HamiltonianMode::Effective;
  out.diagnostics.min_eigenvalue = open ? 1.0 : 0.0;

  StateVector psi = plan.initial;
  DensityMatrix rho = projector(plan.initial);
  double offset = 0.0;
  for (std::size_t s = 0; s < last; ++s) {
    const ProtocolStep& step = plan.steps[s];
    const TimeGrid grid{0.0, step.duration, options.grid_steps};
    const double half = 0.5 * grid.dt();
    std::vector<ComplexMatrix> table;
    table.reserve(2 * grid.steps + 1);
    double scale = 0.0;
    double peak = 0.0;
    for (std::size_t j = 0; j <= 2 * grid.steps; ++j) {
      const double t = j == 2 * grid.steps ? step.duration : static_cast<double>(j) * half;
      table.push_back(build_step_hamiltonian(step, model, t, options.mode));
      scale = std::max(scale, table.back().norm());
      if (options.mode == HamiltonianMode::RotatingFrame) {
        for (const Complex& a : qubit_drive_amplitudes(step, n, t)) {
          peak = std::max(peak, std::abs(a));
        }
      }
    }
    if (options.mode == HamiltonianMode::RotatingFrame && options.enforce_strong_coupling && !step.couplings.empty() &&
        model.coupling_T() / step.duration < 10.0 * peak) {
      throw ConstraintError(step.name + ": coupling is below ten times the peak Rabi amplitude");
    }
    const HamiltonianFn h = [&](double t) -> ComplexMatrix {
      const auto j = static_cast<std::size_t>(std::llround(t / half));
      return table.at(std::min(j, table.size() - 1));
    };

    SimulationResult part;
    if (open) {
      std::vector<Dissipator> dissipators;
      for (std::size_t q = 0; q < n && model.kappa_T > 0.0; ++q) {
        dissipators.push_back({embed_qubit_operator(pauli::lowering(), q, n), model.kappa_T / step.duration});
      }
      const DensityTrajectory traj = propagate_lindblad(h, dissipators, rho, grid);
      rho = traj.states.back();
      part = metrics(traj, step.target, plan.labels);
      out.diagnostics.trace_drift = std::max(out.diagnostics.trace_drift, part.diagnostics.trace_drift);
      out.diagnostics.min_eigenvalue = std::min(out.diagnostics.min_eigenvalue, part.diagnostics.min_eigenvalue);
    } else {
      const StateTrajectory traj = propagate_schrodinger(h, psi, grid);
      psi = traj.states.back();
      part = metrics(traj, step.target, plan.labels);
      out.diagnostics.norm_drift = std::max(out.diagnostics.norm_drift, part.diagnostics.norm_drift);
    }

    const ComplexMatrix e = embedding_matrix(step, n);
    const std::size_t k = passage_index(step);
    for (std::size_t i = 0; i < grid.points(); ++i) {
      const AncillaryFrame f = build_frame(step.layout, step.schedules, grid.time(i));
      const double r = von_neumann_residual(e * f.basis(k), e * f.derivative(k), table[2 * i]);
      part.residual[i] = scale > 0.0 ? r / scale : r;
    }

    for (std::size_t i = s == 0 ? 0 : 1; i < grid.points(); ++i) {
      out.times.push_back(offset + part.times[i]);
      for (std::size_t l = 0; l < out.labels.size(); ++l) {
        out.populations[l].push_back(part.populations[l][i]);
      }
      out.fidelity.push_back(part.fidelity[i]);
      out.residual.push_back(part.residual[i]);
      out.diagnostics.max_residual = std::max(out.diagnostics.max_residual, part.residual[i]);
    }
    out.step_fidelities.push_back(part.fidelity.back());
    offset += step.duration;
  }
  out.final_state = open ? rho : projector(psi);
  out.final_fidelity = out.step_fidelities.back();
  return out;
}

}  // namespace nap
