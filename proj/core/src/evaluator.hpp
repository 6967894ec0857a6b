#pragma once

// Cached complex copies of the system data for repeated evaluation along a
// frequency grid. One instance per thread; evaluate() reuses no state across
// calls other than the cached coefficients.

#include <vector>

#include "ddae/response.hpp"

namespace ddae::detail {

class TransferEvaluator {
 public:
  TransferEvaluator(const DdaeSystem& sys, DelaySpan tau);

  /// Full T(jw). Throws EvaluationError on a singular characteristic matrix.
  CMatrix evaluate(double omega) const;
  double sigma1(double omega) const { return sigma_max(evaluate(omega)); }

 private:
  CMatrix E_;
  std::vector<CMatrix> A_;
  CMatrix B_;
  CMatrix C_;
  Delays tau_;
};

class AsymptoticEvaluator {
 public:
  explicit AsymptoticEvaluator(const BlockDecomposition& dec);

  /// T_a on the torus; theta has dec.m() entries.
  CMatrix torus(std::span<const double> theta) const;
  /// T_a(jw) = torus(w * tau).
  CMatrix frequency(double omega, DelaySpan tau) const;

  double sigma1_torus(std::span<const double> theta) const { return sigma_max(torus(theta)); }
  double sigma1(double omega, DelaySpan tau) const { return sigma_max(frequency(omega, tau)); }
  /// sigma_min of the torus matrix -A22[0] - sum A22[i] e^{-j theta_i}.
  double torus_sigma_min(std::span<const double> theta) const;

  int nu() const { return nu_; }
  int m() const { return m_; }

 private:
  CMatrix torus_matrix(std::span<const double> theta) const;

  int nu_;
  int m_;
  std::vector<CMatrix> A22_;
  CMatrix B2_;
  CMatrix C2_;
};

}  // namespace ddae::detail
