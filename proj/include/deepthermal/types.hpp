#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace deepthermal {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// A spin configuration packed into an integer: site j (1-based) is bit j-1,
// bit value 1 = up = sigma^z eigenvalue +1.
using Bits = std::uint64_t;

inline constexpr int kMaxSites = 30;

}  // namespace deepthermal
