#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ddae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

using Delays = std::vector<double>;
using DelaySpan = std::span<const double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Spectral norm; 0 for empty matrices.
double spectral_norm(const Matrix& m);

/// Singular values in nonincreasing order.
Vector singular_values(const CMatrix& m);

/// Largest singular value; 0 for empty matrices.
double sigma_max(const CMatrix& m);

/// Smallest singular value of a square matrix; +inf for 0x0.
double sigma_min(const Matrix& m);
double sigma_min(const CMatrix& m);

}  // namespace ddae
