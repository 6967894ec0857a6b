#pragma once

#include <limits>
#include <string>
#include <vector>

#include "ddae/linalg.hpp"

namespace ddae {

/// Default relative rank tolerance: sigma_i >= kDefaultRankTol * sigma_1(E)
/// counts toward rank(E).
inline constexpr double kDefaultRankTol = 1e-10;

/// Two delays closer than this are treated as the same delay.
inline constexpr double kDelayMergeTol = 1e-12;

/// Linear time-delay system in descriptor form
///
///   E x'(t) = A_0 x(t) + sum_{i=1..m} A_i x(t - tau_i) + B w(t)
///   z(t)    = C x(t)
///
/// Immutable after construction. The constructor validates shapes and
/// requires strictly positive delays; it does not reorder them (see
/// canonicalize()).
class DdaeSystem {
 public:
  DdaeSystem(Matrix E, std::vector<Matrix> A, Matrix B, Matrix C, Delays tau);

  int n() const { return static_cast<int>(E_.rows()); }
  int m() const { return static_cast<int>(tau_.size()); }
  int inputs() const { return static_cast<int>(B_.cols()); }
  int outputs() const { return static_cast<int>(C_.rows()); }

  const Matrix& E() const { return E_; }
  /// A(0) is the undelayed matrix, A(i) multiplies x(t - tau_i).
  const Matrix& A(int i) const { return A_.at(static_cast<std::size_t>(i)); }
  const std::vector<Matrix>& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }
  const Delays& delays() const { return tau_; }

  /// Same matrices, different delay values (same count, all positive).
  DdaeSystem with_delays(Delays tau) const;

 private:
  Matrix E_;
  std::vector<Matrix> A_;
  Matrix B_;
  Matrix C_;
  Delays tau_;
};

/// Sorts delays increasingly, merges delays equal within kDelayMergeTol by
/// summing their coefficient matrices, and folds zero delays into A_0.
/// Zero delays are accepted here (and only here) so builders can pass
/// tau = 0 paths through.
DdaeSystem canonicalize(const Matrix& E, std::vector<Matrix> A, const Matrix& B,
                        const Matrix& C, Delays tau);
DdaeSystem canonicalize(const DdaeSystem& sys);

/// Throws DimensionError unless tau has sys.m() strictly positive entries.
void check_delays(const DdaeSystem& sys, DelaySpan tau);

struct NullspaceBases {
  Matrix U;      ///< n x nu, left nullspace: U^T E = 0
  Matrix V;      ///< n x nu, right nullspace: E V = 0
  Matrix Uperp;  ///< n x (n - nu), completes [Uperp U] to an orthogonal matrix
  Matrix Vperp;  ///< n x (n - nu), completes [Vperp V] to an orthogonal matrix
  int rank = 0;

  int nu() const { return static_cast<int>(U.cols()); }
};

/// Orthonormal bases from the SVD of E. Singular values at or above
/// rank_tol * sigma_1(E) count toward the rank.
NullspaceBases nullspace_bases(const Matrix& E, double rank_tol = kDefaultRankTol);

/// Congruence of the system with [Vperp V] and [Uperp U]:
/// index 1 is the differential part, index 2 the algebraic part.
struct BlockDecomposition {
  NullspaceBases bases;
  Matrix E11;
  std::vector<Matrix> A11, A12, A21, A22;  ///< one per A_i, i = 0..m
  Matrix B1, B2, C1, C2;
  double rank_tol = kDefaultRankTol;

  int n() const { return static_cast<int>(bases.U.rows()); }
  int nu() const { return bases.nu(); }
  int m() const { return static_cast<int>(A22.size()) - 1; }
};

BlockDecomposition decompose(const DdaeSystem& sys, double rank_tol = kDefaultRankTol);

struct Assumption1Check {
  bool ok = false;
  /// sigma_min(U^T A_0 V); +inf when nu = 0.
  double margin = 0.0;
};

Assumption1Check check_assumption1(const BlockDecomposition& dec, double tol = 1e-10);

/// Default torus resolution: 400 per axis for m <= 2, 64 for m = 3,
/// 16 for m = 4. Throws PreconditionError for m > 4.
int default_grid_per_dim(int m);

/// gamma_a = max over a uniform theta grid of the spectral radius of
/// A22[0]^{-1} sum_{i>=1} A22[i] e^{-j theta_i}. The delay-difference part is
/// strongly stable only if gamma_a < 1. The grid is {2 pi k / N}, so doubling
/// N refines it.
double check_difference_stability(const BlockDecomposition& dec, int grid_per_dim);

struct AxisScan {
  double min_sigma = std::numeric_limits<double>::infinity();
  double at_omega = 0.0;
};

/// Minimum over the sampled frequencies of sigma_min(j w E - A_0 - sum A_i e^{-j w tau_i}).
/// A value near zero flags a characteristic root close to the imaginary axis.
AxisScan imaginary_axis_scan(const DdaeSystem& sys, DelaySpan tau,
                             std::span<const double> omegas);

struct ValidationReport {
  int rank_E = 0;
  bool assumption1_ok = false;
  double assumption1_margin = 0.0;
  /// NaN when not computed (Assumption 1 failed).
  double difference_stability_margin = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> messages;

  bool passed() const { return assumption1_ok && difference_stability_margin < 1.0; }
};

struct ValidationOptions {
  double rank_tol = kDefaultRankTol;
  double assumption1_tol = 1e-10;
  int grid_per_dim = 0;  ///< 0 selects default_grid_per_dim(m)
};

ValidationReport validate(const DdaeSystem& sys, const ValidationOptions& opts = {});

}  // namespace ddae
