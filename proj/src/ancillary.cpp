#include "nap/ancillary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nap/errors.hpp"

namespace nap {

std::size_t SubspaceLayout::assistant_level(std::size_t m) const {
  if (m >= assistant) {
    throw LayoutError("assistant level index out of range");
  }
  return m;
}

std::size_t SubspaceLayout::working_level(std::size_t n) const {
  if (n >= working) {
    throw LayoutError("working level index out of range");
  }
  return assistant + n;
}

void SubspaceLayout::validate() const {
  if (assistant < 1) {
    throw LayoutError("layout needs at least one assistant level");
  }
  if (working < 2) {
    throw LayoutError("layout needs at least two working levels");
  }
}

namespace {

// A vector with its time derivative.
struct Moving {
  StateVector v;
  StateVector dv;
};

struct Angle {
  double c, s, dtheta;
  Complex phase;  // e^{-i alpha}
  double dalpha;
};

Angle angle(const ScheduleSet& schedules, const std::string& theta, const std::string& alpha, double t) {
  const ScheduleValue th = schedules.eval(theta, t);
  const ScheduleValue al = schedules.eval(alpha, t);
  return {std::cos(th.value), std::sin(th.value), th.derivative, std::exp(-kI * al.value), al.derivative};
}

// x = a*u + b*e^{-i alpha}*w with static w; returns (x, dx).
Moving combine(double a, double da, const Moving& u, double b, double db, const Angle& g, const StateVector& w) {
  const Complex coef = b * g.phase;
  const Complex dcoef = (db - kI * g.dalpha * b) * g.phase;
  return {a * u.v + coef * w, da * u.v + a * u.dv + dcoef * w};
}

Moving combine_moving(double a, double da, const Moving& u, double b, double db, const Angle& g, const Moving& w) {
  const Complex coef = b * g.phase;
  const Complex dcoef = (db - kI * g.dalpha * b) * g.phase;
  return {a * u.v + coef * w.v, da * u.v + a * u.dv + dcoef * w.v + coef * w.dv};
}

}  // namespace

AncillaryFrame build_frame(const SubspaceLayout& layout, const ScheduleSet& schedules, double t) {
  layout.validate();
  if (schedules.assistant() != layout.assistant || schedules.working() != layout.working) {
    throw LayoutError("schedule set does not match the layout");
  }
  schedules.require(false);
  const std::size_t M = layout.assistant;
  const std::size_t N = layout.working;
  const auto K = static_cast<Eigen::Index>(layout.dimension());

  AncillaryFrame f;
  f.time = t;
  f.layout = layout;
  f.bases = ComplexMatrix::Zero(K, K);
  f.derivatives = ComplexMatrix::Zero(K, K);
  f.bright = ComplexMatrix::Zero(K, static_cast<Eigen::Index>(M + N - 2));
  f.bright_derivatives = ComplexMatrix::Zero(K, static_cast<Eigen::Index>(M + N - 2));

  auto put = [](ComplexMatrix& vs, ComplexMatrix& ds, std::size_t k, const Moving& x) {
    vs.col(static_cast<Eigen::Index>(k)) = x.v;
    ds.col(static_cast<Eigen::Index>(k)) = x.dv;
  };

  Moving bt{basis_vector(K, 0), StateVector::Zero(K)};
  for (std::size_t m = 0; m + 1 < M; ++m) {
    const Angle g = angle(schedules, symbol::theta_tilde(m), symbol::alpha_tilde(m), t);
    const StateVector e = basis_vector(K, static_cast<Eigen::Index>(layout.assistant_level(m + 1)));
    put(f.bases, f.derivatives, m, combine(g.s, g.c * g.dtheta, bt, g.c, -g.s * g.dtheta, g, e));
    bt = combine(g.c, -g.s * g.dtheta, bt, -g.s, -g.c * g.dtheta, g, e);
    put(f.bright, f.bright_derivatives, m, bt);
  }

  Moving b{basis_vector(K, static_cast<Eigen::Index>(layout.working_level(0))), StateVector::Zero(K)};
  for (std::size_t n = 0; n + 1 < N; ++n) {
    const Angle g = angle(schedules, symbol::theta(n), symbol::alpha(n), t);
    const StateVector w = basis_vector(K, static_cast<Eigen::Index>(layout.working_level(n + 1)));
    put(f.bases, f.derivatives, M - 1 + n, combine(g.c, -g.s * g.dtheta, b, -g.s, -g.c * g.dtheta, g, w));
    b = combine(g.s, g.c * g.dtheta, b, g.c, -g.s * g.dtheta, g, w);
    put(f.bright, f.bright_derivatives, M - 1 + n, b);
  }

  const Angle g = angle(schedules, symbol::kMixing, symbol::kRelativePhase, t);
  put(f.bases, f.derivatives, f.lower_passage(), combine_moving(g.c, -g.s * g.dtheta, b, -g.s, -g.c * g.dtheta, g, bt));
  put(f.bases, f.derivatives, f.upper_passage(), combine_moving(g.s, g.c * g.dtheta, b, g.c, -g.s * g.dtheta, g, bt));

  f.assistant_terminal = bt.v;
  f.assistant_terminal_derivative = bt.dv;
  f.working_terminal = b.v;
  f.working_terminal_derivative = b.dv;
  return f;
}

double frame_derivative_check(const SubspaceLayout& layout, const ScheduleSet& schedules, double t, double h) {
  if (!(h > 0.0)) {
    throw DomainError("finite-difference step must be positive");
  }
  const AncillaryFrame mid = build_frame(layout, schedules, t);
  const double T = schedules.duration();
  const double a = std::max(0.0, t - h);
  const double b = std::min(T, t + h);
  const ComplexMatrix fd = (build_frame(layout, schedules, b).bases - build_frame(layout, schedules, a).bases) / (b - a);
  return (fd - mid.derivatives).cwiseAbs().maxCoeff();
}

}  // namespace nap
