#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qmem {

enum class ExtremumType { Minimum, Maximum };

struct Extremum {
  std::size_t index;
  ExtremumType type;
};

/// Turning points of a sampled curve starting at `begin`. An extremum is
/// confirmed only once the curve has moved away from it by more than
/// `noise_floor`, so wiggles below the floor and the end points are never
/// reported. Minima and maxima alternate in the result.
inline std::vector<Extremum> turning_points(std::span<const double> values, double noise_floor, std::size_t begin = 0) {
  std::vector<Extremum> out;
  if (begin >= values.size()) return out;
  int direction = 0;
  std::size_t ext = begin;
  for (std::size_t i = begin + 1; i < values.size(); ++i) {
    const double v = values[i];
    if (direction == 0) {
      if (v > values[begin] + noise_floor) {
        direction = +1;
        ext = i;
      } else if (v < values[begin] - noise_floor) {
        direction = -1;
        ext = i;
      }
    } else if (direction > 0) {
      if (v > values[ext]) {
        ext = i;
      } else if (v < values[ext] - noise_floor) {
        out.push_back({ext, ExtremumType::Maximum});
        direction = -1;
        ext = i;
      }
    } else {
      if (v < values[ext]) {
        ext = i;
      } else if (v > values[ext] + noise_floor) {
        out.push_back({ext, ExtremumType::Minimum});
        direction = +1;
        ext = i;
      }
    }
  }
  return out;
}

}  // namespace qmem
