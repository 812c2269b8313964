#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace sensopt {

/// Sensor weight vector omega over the grid vertices. Entries live in [0, 1];
/// an entry >= 0.5 marks an active sensor at that vertex.
struct SensorWeights {
  Eigen::VectorXd omega;

  SensorWeights() = default;
  explicit SensorWeights(Eigen::VectorXd w) : omega(std::move(w)) {
    for (int i = 0; i < omega.size(); ++i)
      if (!(omega(i) >= 0.0 && omega(i) <= 1.0))
        throw std::invalid_argument("sensor weights must lie in [0, 1]");
  }

  int c() const { return static_cast<int>(omega.size()); }
};

inline std::vector<int> active_set(const SensorWeights& w) {
  std::vector<int> idx;
  for (int i = 0; i < w.c(); ++i)
    if (w.omega(i) >= 0.5) idx.push_back(i);
  return idx;
}

inline double coverage(const SensorWeights& w) {
  if (w.c() == 0) return 0.0;
  return static_cast<double>(active_set(w).size()) / w.c();
}

/// Componentwise clamp to the box [0, 1]^c. Idempotent.
inline SensorWeights project_box(const Eigen::VectorXd& v) {
  SensorWeights w;
  w.omega = v.cwiseMax(0.0).cwiseMin(1.0);
  return w;
}

}  // namespace sensopt
