#pragma once
#include <Eigen/Dense>
#include <complex>
#include <random>

#include "rnnv/spinops.hpp"

namespace testutil {

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs(const Eigen::MatrixXcd& a) {
  return a.cwiseAbs().maxCoeff();
}

// deterministic Euler-angle generator for property tests
inline std::vector<rnnv::EulerAngles> random_euler_angles(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> full(-2.0 * rnnv::pi, 2.0 * rnnv::pi);
  std::uniform_real_distribution<double> half(0.0, rnnv::pi);
  std::vector<rnnv::EulerAngles> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back({full(rng), half(rng), full(rng)});
  return out;
}

} // namespace testutil
