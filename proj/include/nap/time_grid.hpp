#pragma once

#include <cstddef>

#include "nap/errors.hpp"

namespace nap {

// Uniform grid of `steps` intervals on [start, stop].
struct TimeGrid {
  double start = 0.0;
  double stop = 1.0;
  std::size_t steps = 2000;

  std::size_t points() const { return steps + 1; }
  double dt() const { return (stop - start) / static_cast<double>(steps); }
  double time(std::size_t i) const {
    return i == steps ? stop : start + static_cast<double>(i) * dt();
  }
  void validate() const {
    if (steps == 0 || !(stop > start)) {
      throw DomainError("time grid needs at least one step on a non-empty interval");
    }
  }
};

}  // namespace nap
