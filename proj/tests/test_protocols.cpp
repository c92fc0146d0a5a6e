#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nap/errors.hpp"
#include "nap/protocols.hpp"

using namespace nap;
constexpr double kPi = std::numbers::pi;

namespace {

ComplexMatrix embedding(const ProtocolStep& step, std::size_t qubits) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  ComplexMatrix e = ComplexMatrix::Zero(dim, static_cast<Eigen::Index>(step.embedding.size()));
  for (std::size_t k = 0; k < step.embedding.size(); ++k) {
    e(static_cast<Eigen::Index>(step.embedding[k]), static_cast<Eigen::Index>(k)) = 1.0;
  }
  return e;
}

QubitModel model(std::size_t count, double kappa_T = 0.0) {
  QubitModel m;
  m.count = count;
  m.kappa_T = kappa_T;
  return m;
}

std::size_t nonzero_count(const ComplexMatrix& h) {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      n += h(i, j) != Complex{0.0, 0.0} ? 1 : 0;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("product basis labels") {
  CHECK(product_index("gg") == 0);
  CHECK(product_index("eg") == 2);
  CHECK(product_index("ge") == 1);
  CHECK(product_index("eee") == 7);
  CHECK(product_label(6, 3) == "eeg");
  CHECK_THROWS_AS(product_index("gx"), LayoutError);
  const StateVector s = superposition("ee", 1.0, "gg", -1.0);
  CHECK(s(3).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s(0).real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("Bell plan targets") {
  const ProtocolPlan bell = plan_bell();
  REQUIRE(bell.steps.size() == 2);
  CHECK(fidelity(superposition("eg", 1.0, "ge", 1.0), projector(bell.steps[0].target)) == doctest::Approx(1.0));
  CHECK(fidelity(superposition("ee", 1.0, "gg", -1.0), projector(bell.steps[1].target)) == doctest::Approx(1.0));
  CHECK(bell.steps[0].rule == DriveFrequencyRule::AboveByCoupling);
  CHECK(bell.steps[1].rule == DriveFrequencyRule::Bare);
  CHECK(bell.steps[1].couplings.empty());
  std::vector<std::string> names;
  for (const auto& l : bell.labels) {
    names.push_back(l.name);
  }
  CHECK(names == std::vector<std::string>{"ee", "eg", "ge", "gg"});

  const ProtocolPlan rev = plan_bell_reverse();
  CHECK(fidelity(superposition("eg", 1.0, "ge", 1.0), projector(rev.target)) == doctest::Approx(1.0));
  CHECK(fidelity(superposition("ee", 1.0, "gg", -1.0), projector(rev.initial)) == doctest::Approx(1.0));
}

TEST_CASE("GHZ plan targets") {
  const ProtocolPlan ghz = plan_ghz(3);
  REQUIRE(ghz.steps.size() == 3);
  CHECK(fidelity(superposition("eeg", 1.0, "ggg", -1.0), projector(ghz.steps[1].target)) == doctest::Approx(1.0));
  CHECK(fidelity(superposition("eee", 1.0, "ggg", -1.0), projector(ghz.target)) == doctest::Approx(1.0));
  CHECK(ghz.steps[2].rule == DriveFrequencyRule::BelowByCoupling);
  CHECK(ghz.steps[2].driven == std::vector<std::size_t>{2});
  CHECK(ghz.steps[2].couplings == std::vector<std::pair<std::size_t, std::size_t>>{{1, 2}});
  CHECK_THROWS_AS(plan_ghz(2), LayoutError);
}

TEST_CASE("effective Bell step-1 Hamiltonian") {
  const ProtocolPlan bell = plan_bell();
  const ProtocolStep& step = bell.steps[0];
  const double t = 0.5;
  const ComplexMatrix h = build_step_hamiltonian(step, model(2), t);
  const DriveSample d = step.plan->sample(t);
  const std::size_t gg = 0, ge = 1, eg = 2, ee = 3;
  CHECK(std::abs(d.rabi(0, 0)) == doctest::Approx(std::abs(d.envelope) / std::sqrt(2.0)));
  CHECK(std::abs(d.rabi(0, 1)) == doctest::Approx(std::abs(d.envelope) / std::sqrt(2.0)));
  CHECK(std::abs(h(gg, eg) - d.rabi(0, 0) * std::exp(kI * d.phase(0, 0))) < 1e-14);
  CHECK(std::abs(h(gg, ge) - d.rabi(0, 1) * std::exp(kI * d.phase(0, 1))) < 1e-14);
  CHECK(std::abs(h(eg, gg) - std::conj(h(gg, eg))) == 0.0);
  CHECK(h.row(ee).norm() == 0.0);
  CHECK(h.col(ee).norm() == 0.0);
}

TEST_CASE("drives off give a zero Hamiltonian") {
  const ProtocolPlan bell = plan_bell();
  // Each mixing angle is stationary at one end of its step, so every envelope vanishes there.
  CHECK(build_step_hamiltonian(bell.steps[0], model(2), 0.0).norm() == 0.0);
  CHECK(build_step_hamiltonian(bell.steps[1], model(2), 1.0).norm() == 0.0);
  CHECK(build_step_hamiltonian(bell.steps[1], model(2), 0.0).norm() > 1.0);
}

TEST_CASE("GHZ step 3 couples only the transitions with qubit 1 excited") {
  const ProtocolPlan ghz = plan_ghz(3);
  const ComplexMatrix h = build_step_hamiltonian(ghz.steps[2], model(3), 0.4);
  const auto idx = [](const char* s) { return static_cast<Eigen::Index>(product_index(s)); };
  CHECK(nonzero_count(h) == 4);
  CHECK(std::abs(h(idx("eee"), idx("eeg"))) > 0.1);
  CHECK(std::abs(h(idx("gee"), idx("geg"))) > 0.1);
  CHECK(h(idx("gge"), idx("ggg")) == Complex{0.0, 0.0});
}

TEST_CASE("effective Hamiltonians embed the synthesized layout block") {
  for (const ProtocolPlan& plan : {plan_bell(), plan_bell(1.0, BoundaryChoice::Text), plan_ghz(4)}) {
    for (const ProtocolStep& step : plan.steps) {
      const ComplexMatrix e = embedding(step, plan.qubits);
      for (double t : {0.2, 0.55, 0.9}) {
        const ComplexMatrix h = build_step_hamiltonian(step, model(plan.qubits), t);
        const ComplexMatrix block = step.plan->hamiltonian(t);
        CHECK((e.adjoint() * h * e - block).norm() <= 1e-12 * std::max(1.0, block.norm()));
        // Nothing couples the layout to states outside it.
        CHECK((h * e - e * block).norm() <= 1e-12 * std::max(1.0, block.norm()));
      }
    }
  }
}

TEST_CASE("rotating-frame counter-rotating term averages out over one period") {
  const ProtocolPlan bell = plan_bell();
  const ProtocolStep& step = bell.steps[0];
  QubitModel m = model(2);
  m.omega_T = 400.0 * kPi;  // J T = 40 pi
  const double j = m.coupling_T();
  const double nu = 2.0 * j;
  const double period = 2.0 * kPi / nu;
  const std::size_t ee = 3, ge = 1;
  const double t0 = 0.4;
  const std::size_t samples = 4000;
  Complex avg = 0.0;
  double max_slope = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = t0 + (static_cast<double>(i) + 0.5) * period / static_cast<double>(samples);
    avg += build_step_hamiltonian(step, m, t, HamiltonianMode::RotatingFrame)(ee, ge);
    const double h = 1e-6;
    const Complex d1 = qubit_drive_amplitudes(step, 2, t + h)[0];
    const Complex d0 = qubit_drive_amplitudes(step, 2, t - h)[0];
    max_slope = std::max(max_slope, std::abs(d1 - d0) / (2.0 * h));
  }
  avg /= static_cast<double>(samples);
  const double peak = std::abs(build_step_hamiltonian(step, m, t0, HamiltonianMode::RotatingFrame)(ee, ge));
  CHECK(peak > 1.0);
  CHECK(std::abs(avg) <= 2.0 * max_slope / nu);
  CHECK(std::abs(avg) < 0.05 * peak);
  CHECK_THROWS_AS(build_step_hamiltonian(step, model(2), t0, HamiltonianMode::RotatingFrame), ConstraintError);
}

TEST_CASE("closed Bell run") {
  const SimulationResult r = run_protocol(plan_bell(), model(2));
  REQUIRE(r.step_fidelities.size() == 2);
  CHECK(r.step_fidelities[0] >= 0.99999);
  CHECK(r.step_fidelities[1] >= 0.99999);
  CHECK(r.population("eg")[2000] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(r.population("ge")[2000] == doctest::Approx(0.5).epsilon(1e-3));
  double ee_max = 0.0;
  for (std::size_t i = 0; i <= 2000; ++i) {
    ee_max = std::max(ee_max, r.population("ee")[i]);
  }
  CHECK(ee_max < 1e-20);
  CHECK(r.diagnostics.within_thresholds());
  CHECK(r.times.size() == 4001);
  CHECK(r.times.back() == doctest::Approx(2.0));
}

TEST_CASE("both step-1 boundary configurations generate the Bell state") {
  for (BoundaryChoice b : {BoundaryChoice::Caption, BoundaryChoice::Text}) {
    RunOptions o;
    o.last_step = 1;
    const SimulationResult r = run_protocol(plan_bell(1.0, b), model(2), o);
    CHECK(r.final_fidelity >= 0.99999);
    CHECK(r.diagnostics.max_residual <= 1e-8);
  }
}

TEST_CASE("reverse conversion returns to the single-excitation state") {
  const SimulationResult r = run_protocol(plan_bell_reverse(), model(2));
  CHECK(r.final_fidelity >= 0.99999);
}

TEST_CASE("closed GHZ-3 run") {
  const SimulationResult r = run_protocol(plan_ghz(3), model(3));
  const auto& eeg = r.population("eeg");
  const auto& eee = r.population("eee");
  const auto& ggg = r.population("ggg");
  CHECK(eeg[4000] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(ggg[4000] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(eee[6000] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(ggg[6000] == doctest::Approx(0.5).epsilon(1e-4));
  double lo = 1.0, hi = 0.0;
  for (std::size_t i = 4000; i <= 6000; ++i) {
    lo = std::min(lo, ggg[i]);
    hi = std::max(hi, ggg[i]);
  }
  CHECK(hi - lo <= 1e-6);
  for (double f : r.step_fidelities) {
    CHECK(f >= 0.999);
  }
  CHECK(r.final_fidelity >= 0.99999);
}

TEST_CASE("open Bell run decays and stays physical") {
  const SimulationResult closed = run_protocol(plan_bell(), model(2), RunOptions{.force_density = true});
  const SimulationResult open = run_protocol(plan_bell(), model(2, 0.05));
  CHECK(closed.final_fidelity >= 0.99999);
  CHECK(open.final_fidelity < closed.final_fidelity);
  CHECK(open.diagnostics.trace_drift <= 1e-7);
  CHECK(open.diagnostics.min_eigenvalue >= -1e-7);
  CHECK(open.final_state.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
  const SimulationResult more = run_protocol(plan_bell(), model(2, 0.1));
  CHECK(more.final_fidelity < open.final_fidelity);
}

TEST_CASE("rotating-frame fidelity approaches the effective one as the coupling grows") {
  RunOptions o;
  o.mode = HamiltonianMode::RotatingFrame;
  o.enforce_strong_coupling = false;
  o.last_step = 1;
  o.grid_steps = 4000;
  const ProtocolPlan bell = plan_bell();
  // Peak single-qubit Rabi amplitude of step 1.
  double peak = 0.0;
  for (std::size_t i = 0; i <= 200; ++i) {
    for (const Complex& a : qubit_drive_amplitudes(bell.steps[0], 2, i / 200.0)) {
      peak = std::max(peak, std::abs(a));
    }
  }
  std::vector<double> gaps;
  for (double ratio : {5.0, 10.0, 20.0}) {
    QubitModel m = model(2);
    m.omega_T = ratio * peak / m.coupling_ratio;
    gaps.push_back(1.0 - run_protocol(bell, m, o).final_fidelity);
  }
  CHECK(gaps[0] > gaps[1]);
  CHECK(gaps[1] > gaps[2]);
  CHECK(gaps[2] < 0.05);

  QubitModel weak = model(2);
  weak.omega_T = 5.0 * peak / weak.coupling_ratio;
  o.enforce_strong_coupling = true;
  CHECK_THROWS_AS(run_protocol(bell, weak, o), ConstraintError);
}

TEST_CASE("schedule overrides") {
  ScheduleOverrides wrong;
  wrong[3].insert_or_assign(symbol::kMixing, ParameterSchedule::cosine_ramp(kPi / 2.0));
  CHECK_THROWS_AS(plan_ghz(3, 1.0, 2000, wrong), ConstraintError);

  ScheduleOverrides unknown;
  unknown[1].insert_or_assign("theta_7", ParameterSchedule::constant(0.1));
  CHECK_THROWS_AS(plan_bell(1.0, BoundaryChoice::Caption, 2000, unknown), MissingSymbolError);

  ScheduleOverrides missing_step;
  missing_step[4].insert_or_assign(symbol::kMixing, ParameterSchedule::cosine_ramp(kPi / 2.0));
  CHECK_THROWS_AS(plan_bell(1.0, BoundaryChoice::Caption, 2000, missing_step), MissingSymbolError);

  // An equivalent mixing ramp sampled on a grid is accepted.
  std::vector<double> ts, vs;
  for (int i = 0; i <= 400; ++i) {
    ts.push_back(i / 400.0);
    vs.push_back(kPi / 2.0 * std::cos(kPi * ts.back() / 2.0));
  }
  ScheduleOverrides sampled;
  sampled[1].insert_or_assign(symbol::kMixing, ParameterSchedule::sampled(ts, vs));
  CHECK_NOTHROW(plan_bell(1.0, BoundaryChoice::Caption, 2000, sampled));
}

TEST_CASE("qubit model validation") {
  QubitModel m = model(2);
  m.kappa_T = -1.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  CHECK_THROWS_AS(model(2).coupling_T(), ConstraintError);
  CHECK_THROWS_AS(run_protocol(plan_bell(), model(3)), DimensionError);
}
