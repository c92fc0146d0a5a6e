#include "nap/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nap/errors.hpp"

namespace nap {

namespace {

void check_duration(double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw DomainError("schedule duration must be positive and finite");
  }
}

}  // namespace

ParameterSchedule ParameterSchedule::constant(double value, double duration) {
  check_duration(duration);
  ParameterSchedule s;
  s.kind_ = ScheduleKind::Constant;
  s.duration_ = duration;
  s.offset_ = value;
  return s;
}

ParameterSchedule ParameterSchedule::cosine_ramp(double amplitude, double duration, double offset,
                                                 double shift, std::optional<double> period) {
  check_duration(duration);
  ParameterSchedule s;
  s.kind_ = ScheduleKind::CosineRamp;
  s.duration_ = duration;
  s.amplitude_ = amplitude;
  s.offset_ = offset;
  s.shift_ = shift;
  s.period_ = period.value_or(duration);
  if (!(s.period_ > 0.0)) {
    throw DomainError("cosine ramp period must be positive");
  }
  return s;
}

ParameterSchedule ParameterSchedule::linear_ramp(double start, double slope, double duration) {
  check_duration(duration);
  ParameterSchedule s;
  s.kind_ = ScheduleKind::LinearRamp;
  s.duration_ = duration;
  s.offset_ = start;
  s.amplitude_ = slope;
  return s;
}

ParameterSchedule ParameterSchedule::sampled(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw DomainError("sampled schedule needs at least two (time, value) pairs");
  }
  if (times.front() != 0.0) {
    throw DomainError("sampled schedule must start at t = 0");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw DomainError("sampled schedule times must increase strictly");
    }
  }
  ParameterSchedule s;
  s.kind_ = ScheduleKind::Sampled;
  s.duration_ = times.back();
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

double ParameterSchedule::clamp(double t) const {
  const double slack = 1e-12 * std::max(1.0, duration_);
  if (!(t >= -slack && t <= duration_ + slack)) {
    throw DomainError("schedule evaluated at t = " + std::to_string(t) + " outside [0, " +
                      std::to_string(duration_) + "]");
  }
  return std::clamp(t, 0.0, duration_);
}

ScheduleValue ParameterSchedule::eval(double t) const {
  t = clamp(t);
  switch (kind_) {
    case ScheduleKind::Constant:
      return {offset_, 0.0};
    case ScheduleKind::CosineRamp: {
      const double k = std::numbers::pi / (2.0 * period_);
      const double arg = k * (t + shift_);
      return {offset_ + amplitude_ * std::cos(arg), -amplitude_ * k * std::sin(arg)};
    }
    case ScheduleKind::LinearRamp:
      return {offset_ + amplitude_ * t, amplitude_};
    case ScheduleKind::Sampled: {
      auto interp = [this](double x) {
        auto it = std::upper_bound(times_.begin(), times_.end(), x);
        std::size_t hi = std::min<std::size_t>(it - times_.begin(), times_.size() - 1);
        std::size_t lo = hi - 1;
        const double w = (x - times_[lo]) / (times_[hi] - times_[lo]);
        return values_[lo] + w * (values_[hi] - values_[lo]);
      };
      const double h = 1e-6 * duration_;
      const double a = std::max(0.0, t - h);
      const double b = std::min(duration_, t + h);
      return {interp(t), (interp(b) - interp(a)) / (b - a)};
    }
  }
  return {};
}

bool ParameterSchedule::is_constant() const {
  switch (kind_) {
    case ScheduleKind::Constant:
      return true;
    case ScheduleKind::CosineRamp:
    case ScheduleKind::LinearRamp:
      return amplitude_ == 0.0;
    case ScheduleKind::Sampled:
      return std::all_of(values_.begin(), values_.end(),
                         [this](double v) { return v == values_.front(); });
  }
  return false;
}

namespace symbol {
std::string theta(std::size_t n) { return "theta_" + std::to_string(n); }
std::string alpha(std::size_t n) { return "alpha_" + std::to_string(n); }
std::string theta_tilde(std::size_t m) { return "theta_tilde_" + std::to_string(m); }
std::string alpha_tilde(std::size_t m) { return "alpha_tilde_" + std::to_string(m); }
}  // namespace symbol

ScheduleSet::ScheduleSet(std::size_t assistant, std::size_t working, double duration)
    : assistant_(assistant), working_(working), duration_(duration) {
  check_duration(duration);
}

ScheduleSet& ScheduleSet::set(const std::string& name, ParameterSchedule schedule) {
  if (std::abs(schedule.duration() - duration_) > 1e-12 * std::max(1.0, duration_)) {
    throw DomainError("schedule '" + name + "' duration does not match the set duration");
  }
  schedules_.insert_or_assign(name, std::move(schedule));
  return *this;
}

bool ScheduleSet::contains(std::string_view name) const { return schedules_.find(name) != schedules_.end(); }

const ParameterSchedule& ScheduleSet::at(const std::string& name) const {
  auto it = schedules_.find(name);
  if (it == schedules_.end()) {
    throw MissingSymbolError("missing schedule symbol '" + name + "'");
  }
  return it->second;
}

ScheduleValue ScheduleSet::eval(const std::string& name, double t) const { return at(name).eval(t); }

std::vector<std::string> ScheduleSet::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : schedules_) {
    out.push_back(name);
  }
  return out;
}

std::vector<std::string> ScheduleSet::required_names(bool with_drive_phase) const {
  std::vector<std::string> out;
  for (std::size_t m = 0; m + 1 < assistant_; ++m) {
    out.push_back(symbol::theta_tilde(m));
    out.push_back(symbol::alpha_tilde(m));
  }
  for (std::size_t n = 0; n + 1 < working_; ++n) {
    out.push_back(symbol::theta(n));
    out.push_back(symbol::alpha(n));
  }
  out.push_back(symbol::kMixing);
  out.push_back(symbol::kRelativePhase);
  if (with_drive_phase) {
    out.push_back(symbol::kDrivePhase);
  }
  return out;
}

void ScheduleSet::require(bool with_drive_phase) const {
  std::string missing;
  for (const auto& name : required_names(with_drive_phase)) {
    if (!contains(name)) {
      missing += (missing.empty() ? "" : ", ") + name;
    }
  }
  if (!missing.empty()) {
    throw MissingSymbolError("missing schedule symbols: " + missing);
  }
}

}  // namespace nap
