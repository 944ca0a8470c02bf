#pragma once

#include <cstddef>
#include <vector>

namespace saea {

using DecisionVector = std::vector<double>;
using ObjectiveVector = std::vector<double>;

/// Box constraints of a decision space; lower[i] < upper[i].
struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return lower.size(); }
  bool contains(const DecisionVector& x) const;
  double clamp(std::size_t i, double v) const;
};

}  // namespace saea
