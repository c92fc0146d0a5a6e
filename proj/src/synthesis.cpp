#include "nap/synthesis.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "nap/errors.hpp"
#include "nap/tolerances.hpp"

namespace nap {

namespace {

struct Static {
  std::vector<double> sin_tilde, cos_tilde, alpha_tilde;  // m = 0..M-2
  std::vector<double> sin_w, cos_w, alpha_w;              // n = 0..N-2
};

Static angles_at(const SubspaceLayout& layout, const ScheduleSet& s, double t) {
  Static a;
  for (std::size_t m = 0; m + 1 < layout.assistant; ++m) {
    const double th = s.eval(symbol::theta_tilde(m), t).value;
    a.sin_tilde.push_back(std::sin(th));
    a.cos_tilde.push_back(std::cos(th));
    a.alpha_tilde.push_back(s.eval(symbol::alpha_tilde(m), t).value);
  }
  for (std::size_t n = 0; n + 1 < layout.working; ++n) {
    const double th = s.eval(symbol::theta(n), t).value;
    a.sin_w.push_back(std::sin(th));
    a.cos_w.push_back(std::cos(th));
    a.alpha_w.push_back(s.eval(symbol::alpha(n), t).value);
  }
  return a;
}

double residual_of(const StateVector& mu, const StateVector& dmu, const ComplexMatrix& h) {
  const ComplexMatrix p = mu * mu.adjoint();
  const ComplexMatrix dp = dmu * mu.adjoint() + mu * dmu.adjoint();
  return (dp + kI * (h * p - p * h)).norm();
}

ComplexMatrix assemble(const SubspaceLayout& layout, double detuning, const ComplexMatrix& couplings) {
  const auto M = static_cast<Eigen::Index>(layout.assistant);
  const auto K = static_cast<Eigen::Index>(layout.dimension());
  ComplexMatrix h = ComplexMatrix::Zero(K, K);
  for (Eigen::Index m = 0; m < M; ++m) {
    h(m, m) = detuning;
  }
  h.block(0, M, M, K - M) = couplings;
  h.block(M, 0, K - M, M) = couplings.adjoint();
  return h;
}

struct EnvelopeTerms {
  double omega = 0.0;
  double detuning = 0.0;
  double varphi = 0.0;
};

EnvelopeTerms envelope_terms(const ScheduleSet& s, DetuningForm form, double t) {
  const ScheduleValue mix = s.eval(symbol::kMixing, t);
  const ScheduleValue rel = s.eval(symbol::kRelativePhase, t);
  const double varphi = s.eval(symbol::kDrivePhase, t).value;
  const double x = varphi + rel.value;
  EnvelopeTerms e;
  e.varphi = varphi;
  e.detuning = rel.derivative;
  if (std::abs(mix.derivative) <= tol::kStatic) {
    return e;
  }
  const double sx = std::sin(x);
  const double cx = std::cos(x);
  e.omega = -mix.derivative / sx;
  if (std::abs(cx) > tol::kStatic) {
    const double factor = form == DetuningForm::Cotangent ? std::cos(2.0 * mix.value) / std::sin(2.0 * mix.value)
                                                          : std::cos(2.0 * mix.value);
    e.detuning += -2.0 * mix.derivative * (cx / sx) * factor;
  }
  return e;
}

void check_static(const ScheduleSet& s, const std::string& name) {
  if (!s.at(name).is_constant()) {
    throw ConstraintError("schedule '" + name + "' must be constant for this synthesis");
  }
}

}  // namespace

AuxiliaryDrive::AuxiliaryDrive(SubspaceLayout layout, ScheduleSet schedules, std::size_t target,
                               ConversionReading reading)
    : layout_(layout), schedules_(std::move(schedules)), target_(target), reading_(reading) {
  layout_.validate();
  if (target_ + 2 > layout_.assistant) {
    throw LayoutError("dark-state conversion needs m <= M - 2");
  }
  schedules_.require(false);
}

AuxiliarySample AuxiliaryDrive::sample(double t) const {
  const std::size_t m = target_;
  const Static a = angles_at(layout_, schedules_, t);
  AuxiliarySample out;
  out.target = m;
  out.detuning = schedules_.eval(symbol::alpha_tilde(m), t).derivative;
  if (reading_ == ConversionReading::AssistantAngle) {
    out.envelope = -schedules_.eval(symbol::theta_tilde(m), t).derivative;
  } else {
    const std::string name = symbol::theta(m);
    out.envelope = schedules_.contains(name) ? -schedules_.eval(name, t).derivative : 0.0;
  }
  for (std::size_t n = 0; n <= m; ++n) {
    const double sin_prev = n == 0 ? -1.0 : a.sin_tilde[n - 1];
    const double alpha_prev = n == 0 ? 0.0 : a.alpha_tilde[n - 1];
    double prod = 1.0;
    for (std::size_t k = n; k < m; ++k) {
      prod *= a.cos_tilde[k];
    }
    out.rabi.push_back(-out.envelope * sin_prev * prod);
    out.phase.push_back(std::numbers::pi / 2.0 - a.alpha_tilde[m] + alpha_prev);
  }
  return out;
}

ComplexMatrix AuxiliaryDrive::hamiltonian(double t) const {
  const AuxiliarySample s = sample(t);
  const auto K = static_cast<Eigen::Index>(layout_.dimension());
  const auto e = static_cast<Eigen::Index>(layout_.assistant_level(target_ + 1));
  ComplexMatrix h = ComplexMatrix::Zero(K, K);
  h(e, e) = s.detuning;
  for (std::size_t n = 0; n < s.rabi.size(); ++n) {
    const Complex c = s.rabi[n] * std::exp(kI * s.phase[n]);
    h(e, static_cast<Eigen::Index>(n)) += c;
    h(static_cast<Eigen::Index>(n), e) += std::conj(c);
  }
  return h;
}

AuxiliaryDrive convert_dark_state(const SubspaceLayout& layout, const ScheduleSet& schedules, std::size_t m,
                                  ConversionReading reading) {
  return AuxiliaryDrive(layout, schedules, m, reading);
}

ComplexMatrix DriveSample::couplings() const {
  ComplexMatrix c(rabi.rows(), rabi.cols());
  for (Eigen::Index i = 0; i < rabi.rows(); ++i) {
    for (Eigen::Index j = 0; j < rabi.cols(); ++j) {
      c(i, j) = rabi(i, j) * std::exp(kI * phase(i, j));
    }
  }
  return c;
}

DrivePlan::DrivePlan(SubspaceLayout layout, ScheduleSet schedules, SynthesisOptions options)
    : layout_(layout), schedules_(std::move(schedules)), options_(options) {
  if (options_.converted_assistant) {
    auxiliary_.emplace(layout_, schedules_, *options_.converted_assistant, options_.reading);
  }
}

DriveSample DrivePlan::sample(double t) const {
  const std::size_t M = layout_.assistant;
  const std::size_t N = layout_.working;
  const Static a = angles_at(layout_, schedules_, t);
  const EnvelopeTerms e = envelope_terms(schedules_, options_.detuning, t);

  DriveSample d;
  d.time = t;
  d.envelope = e.omega;
  d.drive_phase = e.varphi;
  d.detuning = e.detuning + options_.detuning_offset;
  d.rabi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(N));
  d.phase = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(N));
  for (std::size_t m = 0; m < M; ++m) {
    const double sin_prev = m == 0 ? -1.0 : a.sin_tilde[m - 1];
    const double alpha_prev = m == 0 ? 0.0 : a.alpha_tilde[m - 1];
    double prod_tilde = 1.0;
    for (std::size_t k = m; k + 1 < M; ++k) {
      prod_tilde *= a.cos_tilde[k];
    }
    for (std::size_t n = 0; n < N; ++n) {
      const double cos_prev = n == 0 ? 1.0 : a.cos_w[n - 1];
      const double alpha_w_prev = n == 0 ? 0.0 : a.alpha_w[n - 1];
      double prod = 1.0;
      for (std::size_t k = n; k + 1 < N; ++k) {
        prod *= a.sin_w[k];
      }
      const auto i = static_cast<Eigen::Index>(m);
      const auto j = static_cast<Eigen::Index>(n);
      d.rabi(i, j) = -e.omega * sin_prev * prod_tilde * cos_prev * prod;
      d.phase(i, j) = e.varphi - alpha_prev + alpha_w_prev;
    }
  }
  if (auxiliary_) {
    d.auxiliary = auxiliary_->sample(t);
  }
  return d;
}

ComplexMatrix DrivePlan::hamiltonian(double t) const {
  const DriveSample d = sample(t);
  ComplexMatrix h = assemble(layout_, d.detuning, d.couplings());
  if (auxiliary_) {
    h += auxiliary_->hamiltonian(t);
  }
  return h;
}

std::vector<DriveSample> DrivePlan::tabulate(const TimeGrid& grid) const {
  grid.validate();
  std::vector<DriveSample> out;
  out.reserve(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) {
    out.push_back(sample(grid.time(i)));
  }
  return out;
}

double DrivePlan::hamiltonian_scale(const TimeGrid& grid) const {
  double scale = 0.0;
  for (std::size_t i = 0; i < grid.points(); ++i) {
    scale = std::max(scale, hamiltonian(grid.time(i)).norm());
  }
  return scale;
}

DrivePlan synthesize_general(const SubspaceLayout& layout, const ScheduleSet& schedules,
                             const SynthesisOptions& options) {
  layout.validate();
  if (schedules.assistant() != layout.assistant || schedules.working() != layout.working) {
    throw LayoutError("schedule set does not match the layout");
  }
  schedules.require(true);
  if (options.grid_steps == 0) {
    throw DomainError("synthesis grid needs at least one step");
  }
  const auto converted = options.converted_assistant;
  if (converted && *converted + 2 > layout.assistant) {
    throw LayoutError("dark-state conversion needs m <= M - 2");
  }
  for (std::size_t m = 0; m + 1 < layout.assistant; ++m) {
    if (converted && *converted == m) {
      continue;
    }
    check_static(schedules, symbol::theta_tilde(m));
    check_static(schedules, symbol::alpha_tilde(m));
  }
  for (std::size_t n = 0; n + 1 < layout.working; ++n) {
    check_static(schedules, symbol::theta(n));
    check_static(schedules, symbol::alpha(n));
  }

  const TimeGrid grid{0.0, schedules.duration(), options.grid_steps};
  for (std::size_t i = 0; i < grid.points(); ++i) {
    const double t = grid.time(i);
    const ScheduleValue mix = schedules.eval(symbol::kMixing, t);
    if (std::abs(mix.derivative) <= tol::kStatic) {
      continue;
    }
    const double x = schedules.eval(symbol::kDrivePhase, t).value + schedules.eval(symbol::kRelativePhase, t).value;
    if (std::abs(std::sin(x)) < tol::kSingularSine) {
      throw SingularDriveError("sin(varphi + alpha) vanishes while the mixing angle moves at t = " +
                               std::to_string(t));
    }
    if (options.detuning == DetuningForm::Cotangent && std::abs(std::cos(x)) > tol::kStatic &&
        std::abs(std::sin(2.0 * mix.value)) < tol::kSingularSine) {
      throw SingularDriveError("sin(2 phi) vanishes while the detuning needs cot(2 phi) at t = " +
                               std::to_string(t));
    }
  }
  return DrivePlan(layout, schedules, options);
}

GeneratedPhases generated_phases(const DrivePlan& plan, const TimeGrid& grid) {
  grid.validate();
  const double slack = 1e-12 * std::max(1.0, plan.duration());
  if (grid.start < -slack || grid.stop > plan.duration() + slack) {
    throw DomainError("phase grid extends beyond the plan duration");
  }
  const SubspaceLayout& layout = plan.layout();
  const std::size_t K = layout.dimension();
  const std::size_t lower = K - 2;
  const std::size_t upper = K - 1;
  const ScheduleSet& s = plan.schedules();

  std::vector<double> minus_delta(grid.points());
  std::vector<double> lower_rate(grid.points());
  std::vector<double> total_rate(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) {
    const double t = grid.time(i);
    const DriveSample d = plan.sample(t);
    const ScheduleValue mix = s.eval(symbol::kMixing, t);
    const double dalpha = s.eval(symbol::kRelativePhase, t).derivative;
    const double x = d.drive_phase + s.eval(symbol::kRelativePhase, t).value;
    const double s2 = std::sin(mix.value) * std::sin(mix.value);
    minus_delta[i] = -d.detuning;
    lower_rate[i] = dalpha * s2 - d.detuning * s2 + d.envelope * std::sin(2.0 * mix.value) * std::cos(x);
    total_rate[i] = dalpha - d.detuning;
  }
  auto integrate = [&](const std::vector<double>& rate) {
    std::vector<double> out(rate.size(), 0.0);
    for (std::size_t i = 1; i < rate.size(); ++i) {
      out[i] = out[i - 1] + 0.5 * grid.dt() * (rate[i] + rate[i - 1]);
    }
    return out;
  };

  GeneratedPhases g;
  g.grid = grid;
  g.values.assign(K, std::vector<double>(grid.points(), 0.0));
  const std::vector<double> assistant = integrate(minus_delta);
  for (std::size_t m = 0; m + 1 < layout.assistant; ++m) {
    g.values[m] = assistant;
  }
  g.values[lower] = integrate(lower_rate);
  const std::vector<double> total = integrate(total_rate);
  for (std::size_t i = 0; i < grid.points(); ++i) {
    g.values[upper][i] = total[i] - g.values[lower][i];
  }
  return g;
}

ReductionReport reduction_crosscheck(const SubspaceLayout& layout, const ScheduleSet& schedules, double phantom_angle,
                                     std::size_t samples) {
  if (layout.assistant != 1 && layout.assistant != 2) {
    throw LayoutError("closed-form reductions exist only for one or two assistant levels");
  }
  const DrivePlan plan = synthesize_general(layout, schedules);
  const std::size_t M = layout.assistant;
  const std::size_t N = layout.working;
  const TimeGrid grid{0.0, schedules.duration(), samples};

  ReductionReport r;
  r.assistant = M;
  r.working = N;
  double scale = 0.0;
  for (std::size_t i = 0; i < grid.points(); ++i) {
    scale = std::max(scale, plan.hamiltonian(grid.time(i)).norm());
  }
  scale = std::max(scale, 1e-300);

  for (const bool printed : {false, true}) {
    double diff = 0.0;
    double residual = 0.0;
    for (std::size_t i = 0; i < grid.points(); ++i) {
      const double t = grid.time(i);
      const DriveSample d = plan.sample(t);
      const Static a = angles_at(layout, schedules, t);
      ComplexMatrix c(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(N));
      for (std::size_t n = 0; n < N; ++n) {
        const double cos_prev = n == 0 ? 1.0 : a.cos_w[n - 1];
        const double alpha_prev = n == 0 ? 0.0 : a.alpha_w[n - 1];
        double prod = 1.0;
        for (std::size_t k = n; k + 1 < N; ++k) {
          prod *= a.sin_w[k];
        }
        if (printed) {
          prod *= std::sin(phantom_angle);
        }
        const double base = d.envelope * cos_prev * prod;
        const auto j = static_cast<Eigen::Index>(n);
        if (M == 1) {
          c(0, j) = base * std::exp(kI * (d.drive_phase + alpha_prev));
        } else {
          c(0, j) = base * a.cos_tilde[0] * std::exp(kI * (d.drive_phase + alpha_prev));
          c(1, j) = -base * a.sin_tilde[0] * std::exp(kI * (d.drive_phase - a.alpha_tilde[0] + alpha_prev));
        }
      }
      diff = std::max(diff, (c - d.couplings()).cwiseAbs().maxCoeff());
      const ComplexMatrix h = assemble(layout, d.detuning, c);
      const AncillaryFrame f = build_frame(layout, schedules, t);
      for (const std::size_t k : {f.lower_passage(), f.upper_passage()}) {
        residual = std::max(residual, residual_of(f.basis(k), f.derivative(k), h) / scale);
      }
    }
    (printed ? r.printed_difference : r.consistent_difference) = diff;
    (printed ? r.printed_residual : r.consistent_residual) = residual;
  }
  r.limits_disagree = r.printed_difference > 1e-12;
  const bool printed_ok = r.printed_residual <= tol::kResidual;
  const bool consistent_ok = r.consistent_residual <= tol::kResidual;
  if (consistent_ok && !printed_ok) {
    r.resolution = "product upper limit N-2; the N-1 limit fails the passage residual";
  } else if (consistent_ok && printed_ok) {
    r.resolution = "both product limits satisfy the passage residual";
  } else {
    r.resolution = "no product limit satisfies the passage residual";
  }
  return r;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void write_drive_csv(std::ostream& out, const DrivePlan& plan, const TimeGrid& grid) {
  const std::size_t M = plan.layout().assistant;
  const std::size_t N = plan.layout().working;
  out << "t,Delta,Omega,varphi";
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < N; ++n) {
      out << ",Omega_" << n << "_" << m << ",phi_" << n << "_" << m;
    }
  }
  out << '\n';
  for (const DriveSample& d : plan.tabulate(grid)) {
    out << format_number(d.time) << ',' << format_number(d.detuning) << ',' << format_number(d.envelope) << ','
        << format_number(d.drive_phase);
    for (Eigen::Index m = 0; m < d.rabi.rows(); ++m) {
      for (Eigen::Index n = 0; n < d.rabi.cols(); ++n) {
        out << ',' << format_number(d.rabi(m, n)) << ',' << format_number(d.phase(m, n));
      }
    }
    out << '\n';
  }
}

}  // namespace nap
