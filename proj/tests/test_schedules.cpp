#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nap/errors.hpp"
#include "nap/schedules.hpp"

using namespace nap;
constexpr double kPi = std::numbers::pi;

TEST_CASE("cosine ramp endpoints") {
  const auto s = ParameterSchedule::cosine_ramp(kPi / 2.0, 1.0);
  const ScheduleValue a = s.eval(0.0);
  CHECK(a.value == doctest::Approx(kPi / 2.0));
  CHECK(a.derivative == doctest::Approx(0.0));
  const ScheduleValue b = s.eval(1.0);
  CHECK(b.value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.derivative == doctest::Approx(-kPi * kPi / 4.0));
}

TEST_CASE("cosine ramp with shift, offset and period") {
  const auto s = ParameterSchedule::cosine_ramp(kPi / 2.0, 1.0, 0.0, 1.0);
  CHECK(std::abs(s.value(0.0)) < 1e-15);
  CHECK(s.value(1.0) == doctest::Approx(-kPi / 2.0));
  const auto m = ParameterSchedule::cosine_ramp(-kPi / 2.0, 2.0, kPi);
  CHECK(m.value(0.0) == doctest::Approx(kPi / 2.0));
  CHECK(m.value(2.0) == doctest::Approx(kPi));
  const auto p = ParameterSchedule::cosine_ramp(1.0, 1.0, 0.0, 0.0, 0.5);
  CHECK(p.value(1.0) == doctest::Approx(-1.0));
}

TEST_CASE("constant and linear schedules") {
  const auto c = ParameterSchedule::constant(kPi / 4.0);
  for (double t : {0.0, 0.3, 1.0}) {
    CHECK(c.eval(t).value == kPi / 4.0);
    CHECK(c.eval(t).derivative == 0.0);
  }
  CHECK(c.is_constant());
  const auto l = ParameterSchedule::linear_ramp(0.5, 2.0, 3.0);
  CHECK(l.value(1.5) == doctest::Approx(3.5));
  CHECK(l.derivative(2.9) == 2.0);
  CHECK_FALSE(l.is_constant());
  CHECK(ParameterSchedule::linear_ramp(1.0, 0.0).is_constant());
}

TEST_CASE("sampled schedule interpolates and differentiates") {
  const auto s = ParameterSchedule::sampled({0.0, 0.5, 1.0}, {0.0, 1.0, 3.0});
  CHECK(s.duration() == 1.0);
  CHECK(s.value(0.25) == doctest::Approx(0.5));
  CHECK(s.derivative(0.25) == doctest::Approx(2.0));
  CHECK(s.derivative(0.75) == doctest::Approx(4.0));
  CHECK_THROWS_AS(ParameterSchedule::sampled({0.1, 1.0}, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(ParameterSchedule::sampled({0.0, 0.0}, {0.0, 1.0}), DomainError);
}

TEST_CASE("evaluation outside the domain fails") {
  const auto s = ParameterSchedule::cosine_ramp(1.0, 2.0);
  CHECK_THROWS_AS(s.eval(-0.01), DomainError);
  CHECK_THROWS_AS(s.eval(2.01), DomainError);
  CHECK_NOTHROW(s.eval(2.0 + 1e-14));
  CHECK_THROWS_AS(ParameterSchedule::constant(0.0, 0.0), DomainError);
}

TEST_CASE("cosine ramp derivative matches a centred difference") {
  const auto s = ParameterSchedule::cosine_ramp(0.8, 1.7, 0.3, 0.2);
  for (double t : {0.1, 0.6, 1.3}) {
    const double h = 1e-5;
    const double fd = (s.value(t + h) - s.value(t - h)) / (2.0 * h);
    CHECK(s.derivative(t) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("schedule sets resolve symbols and report the missing ones") {
  ScheduleSet set(2, 3, 1.0);
  CHECK(set.required_names(true).size() == 2 + 4 + 3);
  set.set(symbol::kMixing, ParameterSchedule::cosine_ramp(1.0));
  CHECK(set.contains("mixing"));
  CHECK_THROWS_AS(set.at(symbol::theta(0)), MissingSymbolError);
  try {
    set.require(true);
    FAIL("expected missing symbols");
  } catch (const MissingSymbolError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("theta_tilde_0") != std::string::npos);
    CHECK(msg.find("drive_phase") != std::string::npos);
  }
  CHECK_THROWS_AS(set.set("alpha", ParameterSchedule::constant(0.0, 2.0)), DomainError);
}
