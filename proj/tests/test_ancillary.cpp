#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nap/ancillary.hpp"
#include "nap/errors.hpp"
#include "nap/verify.hpp"

using namespace nap;
constexpr double kPi = std::numbers::pi;

namespace {

ScheduleSet bell_step1(double phi, double alpha) {
  ScheduleSet s(1, 2);
  s.set(symbol::theta(0), ParameterSchedule::constant(kPi / 4.0));
  s.set(symbol::alpha(0), ParameterSchedule::constant(0.0));
  s.set(symbol::kMixing, ParameterSchedule::constant(phi));
  s.set(symbol::kRelativePhase, ParameterSchedule::constant(alpha));
  return s;
}

// Direct inner products, independent of Eigen's adjoint product.
double gram_defect(const ComplexMatrix& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Complex dot = 0.0;
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        dot += std::conj(b(r, i)) * b(r, j);
      }
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("Bell step-1 boundary frames") {
  // Level order: |gg> (assistant), |eg>, |ge>.
  const SubspaceLayout layout{1, 2};
  const AncillaryFrame start = build_frame(layout, bell_step1(kPi / 2.0, kPi), 0.0);
  const StateVector mu1 = start.basis(start.lower_passage());
  CHECK(std::abs(mu1(0) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(mu1.tail(2).norm() < 1e-15);

  const AncillaryFrame end = build_frame(layout, bell_step1(0.0, kPi), 0.0);
  StateVector bell = StateVector::Zero(3);
  bell(1) = bell(2) = 1.0 / std::sqrt(2.0);
  CHECK((end.basis(end.lower_passage()) - bell).norm() < 1e-15);
}

TEST_CASE("frame indices") {
  const SubspaceLayout layout{3, 4};
  CHECK(AncillaryFrame::working_index(layout, 0) == 2);
  CHECK(AncillaryFrame::working_index(layout, 3) == 5);
  CHECK(layout.working_level(0) == 3);
  CHECK_THROWS_AS(layout.assistant_level(3), LayoutError);
}

TEST_CASE("random 3+4 frames are orthonormal and complete") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const RandomInstance inst = random_instance(rng, 3, 4);
    for (double t : {0.0, 0.37, 1.0}) {
      const AncillaryFrame f = build_frame(inst.layout, inst.schedules, t);
      CHECK(gram_defect(f.bases) <= 1e-12);
      CHECK((f.bases * f.bases.adjoint() - ComplexMatrix::Identity(7, 7)).cwiseAbs().maxCoeff() <= 1e-12);
      // Each bright state is orthogonal to the basis built from it and normalized.
      for (Eigen::Index k = 0; k < f.bright.cols(); ++k) {
        CHECK(std::abs(f.bright.col(k).norm() - 1.0) <= 1e-12);
        CHECK(std::abs(f.bases.col(k).dot(f.bright.col(k))) <= 1e-12);
      }
      // Assistant bases stay in the assistant subspace, dark working bases in the working one.
      for (Eigen::Index k = 0; k < 2; ++k) {
        CHECK(f.bases.col(k).tail(4).norm() <= 1e-15);
      }
      for (Eigen::Index k = 2; k < 5; ++k) {
        CHECK(f.bases.col(k).head(3).norm() <= 1e-15);
      }
    }
  }
}

TEST_CASE("frame derivatives agree with finite differences") {
  std::mt19937_64 rng(99);
  const RandomInstance inst = random_instance(rng, 2, 3);
  const double e1 = frame_derivative_check(inst.layout, inst.schedules, 0.4, 1e-4);
  const double e2 = frame_derivative_check(inst.layout, inst.schedules, 0.4, 5e-5);
  CHECK(e1 <= 1e-6);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));

  ScheduleSet still = bell_step1(0.7, 0.2);
  CHECK(frame_derivative_check({1, 2}, still, 0.5, 1e-4) <= 1e-15);
}

TEST_CASE("frame derivatives are analytic for time-dependent assistant angles") {
  std::mt19937_64 rng(4);
  const RandomInstance inst = random_conversion_instance(rng, 3, 2, 0);
  CHECK(frame_derivative_check(inst.layout, inst.schedules, 0.6, 1e-4) <= 1e-6);
}

TEST_CASE("frame construction errors") {
  ScheduleSet s(1, 2);
  s.set(symbol::kMixing, ParameterSchedule::constant(0.3));
  CHECK_THROWS_AS(build_frame({1, 2}, s, 0.0), MissingSymbolError);
  CHECK_THROWS_AS(build_frame({1, 1}, ScheduleSet(1, 1), 0.0), LayoutError);
  CHECK_THROWS_AS(build_frame({2, 2}, bell_step1(0.1, 0.0), 0.0), LayoutError);
}
