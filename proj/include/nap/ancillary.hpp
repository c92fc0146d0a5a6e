#pragma once

#include <cstddef>

#include "nap/linalg.hpp"
#include "nap/schedules.hpp"

namespace nap {

// M assistant levels |e_m> at indices 0..M-1 followed by N working levels |n> at M..M+N-1.
struct SubspaceLayout {
  std::size_t assistant = 1;
  std::size_t working = 2;

  std::size_t dimension() const { return assistant + working; }
  std::size_t assistant_level(std::size_t m) const;
  std::size_t working_level(std::size_t n) const;
  void validate() const;
};

// Instantaneous ancillary basis. Column order: assistant bases mu~_0..mu~_{M-2},
// dark working bases mu_0..mu_{N-2}, then the two passages mu_{N-1} and mu_N.
struct AncillaryFrame {
  double time = 0.0;
  SubspaceLayout layout;
  ComplexMatrix bases;
  ComplexMatrix derivatives;
  // Bright states b~_0..b~_{M-2} followed by b_0..b_{N-2}.
  ComplexMatrix bright;
  ComplexMatrix bright_derivatives;
  // b~_{M-2} (|e_0> when M = 1) and b_{N-2}.
  StateVector assistant_terminal;
  StateVector assistant_terminal_derivative;
  StateVector working_terminal;
  StateVector working_terminal_derivative;

  static std::size_t assistant_index(const SubspaceLayout&, std::size_t m) { return m; }
  // n runs over 0..N, so N-1 and N give the passages.
  static std::size_t working_index(const SubspaceLayout& l, std::size_t n) { return l.assistant - 1 + n; }

  std::size_t lower_passage() const { return layout.assistant + layout.working - 2; }
  std::size_t upper_passage() const { return layout.assistant + layout.working - 1; }
  StateVector basis(std::size_t k) const { return bases.col(static_cast<Eigen::Index>(k)); }
  StateVector derivative(std::size_t k) const { return derivatives.col(static_cast<Eigen::Index>(k)); }
};

AncillaryFrame build_frame(const SubspaceLayout& layout, const ScheduleSet& schedules, double t);

// Largest difference between analytic derivatives and centred differences of step h.
double frame_derivative_check(const SubspaceLayout& layout, const ScheduleSet& schedules, double t, double h);

}  // namespace nap
