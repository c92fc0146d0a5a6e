#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nap {

enum class ScheduleKind { Constant, CosineRamp, LinearRamp, Sampled };

struct ScheduleValue {
  double value = 0.0;
  double derivative = 0.0;
};

// A scalar function of time on [0, duration] with its first derivative.
class ParameterSchedule {
 public:
  static ParameterSchedule constant(double value, double duration = 1.0);
  // offset + amplitude * cos(pi * (t + shift) / (2 * period)); period defaults to the duration.
  static ParameterSchedule cosine_ramp(double amplitude, double duration = 1.0, double offset = 0.0,
                                       double shift = 0.0, std::optional<double> period = {});
  static ParameterSchedule linear_ramp(double start, double slope, double duration = 1.0);
  // Piecewise-linear interpolation; times must start at 0 and increase strictly.
  static ParameterSchedule sampled(std::vector<double> times, std::vector<double> values);

  ScheduleValue eval(double t) const;
  double value(double t) const { return eval(t).value; }
  double derivative(double t) const { return eval(t).derivative; }

  ScheduleKind kind() const { return kind_; }
  double duration() const { return duration_; }
  bool is_constant() const;

  double amplitude() const { return amplitude_; }
  double offset() const { return offset_; }
  double shift() const { return shift_; }
  double period() const { return period_; }

 private:
  ParameterSchedule() = default;
  double clamp(double t) const;

  ScheduleKind kind_ = ScheduleKind::Constant;
  double duration_ = 1.0;
  double amplitude_ = 0.0;  // cosine amplitude or linear slope
  double offset_ = 0.0;     // constant value, cosine offset or linear start
  double shift_ = 0.0;
  double period_ = 1.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

namespace symbol {
inline const std::string kMixing = "mixing";
inline const std::string kRelativePhase = "alpha";
inline const std::string kDrivePhase = "drive_phase";
std::string theta(std::size_t n);
std::string alpha(std::size_t n);
std::string theta_tilde(std::size_t m);
std::string alpha_tilde(std::size_t m);
}  // namespace symbol

// Named schedules for one M+N system on a common duration.
class ScheduleSet {
 public:
  ScheduleSet(std::size_t assistant, std::size_t working, double duration = 1.0);

  ScheduleSet& set(const std::string& name, ParameterSchedule schedule);
  bool contains(std::string_view name) const;
  const ParameterSchedule& at(const std::string& name) const;
  ScheduleValue eval(const std::string& name, double t) const;

  std::vector<std::string> names() const;
  std::vector<std::string> required_names(bool with_drive_phase) const;
  void require(bool with_drive_phase) const;

  std::size_t assistant() const { return assistant_; }
  std::size_t working() const { return working_; }
  double duration() const { return duration_; }

 private:
  std::size_t assistant_;
  std::size_t working_;
  double duration_;
  std::map<std::string, ParameterSchedule, std::less<>> schedules_;
};

}  // namespace nap
