#include "ddae/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "ddae/errors.hpp"

namespace ddae {

namespace {

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

DdaeSystem::DdaeSystem(Matrix E, std::vector<Matrix> A, Matrix B, Matrix C, Delays tau)
    : E_(std::move(E)), A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), tau_(std::move(tau)) {
  const auto n = E_.rows();
  if (n == 0 || E_.cols() != n) throw DimensionError("E must be square and nonempty, got " + shape(E_));
  if (A_.size() != tau_.size() + 1) {
    throw DimensionError("expected " + std::to_string(tau_.size() + 1) + " A matrices for " +
                         std::to_string(tau_.size()) + " delays, got " + std::to_string(A_.size()));
  }
  for (std::size_t i = 0; i < A_.size(); ++i) {
    if (A_[i].rows() != n || A_[i].cols() != n) {
      throw DimensionError("A_" + std::to_string(i) + " is " + shape(A_[i]) + ", expected " + shape(E_));
    }
  }
  if (B_.rows() != n) throw DimensionError("B has " + std::to_string(B_.rows()) + " rows, expected " + std::to_string(n));
  if (C_.cols() != n) throw DimensionError("C has " + std::to_string(C_.cols()) + " columns, expected " + std::to_string(n));
  for (std::size_t i = 0; i < tau_.size(); ++i) {
    if (!(tau_[i] > 0.0) || !std::isfinite(tau_[i])) {
      throw DimensionError("delay tau_" + std::to_string(i + 1) + " must be finite and > 0");
    }
  }
}

DdaeSystem DdaeSystem::with_delays(Delays tau) const {
  if (tau.size() != tau_.size()) {
    throw DimensionError("with_delays: expected " + std::to_string(tau_.size()) + " delays");
  }
  return DdaeSystem(E_, A_, B_, C_, std::move(tau));
}

void check_delays(const DdaeSystem& sys, DelaySpan tau) {
  if (static_cast<int>(tau.size()) != sys.m()) {
    throw DimensionError("expected " + std::to_string(sys.m()) + " delays, got " + std::to_string(tau.size()));
  }
  for (double t : tau) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DimensionError("delays must be finite and > 0");
  }
}

DdaeSystem canonicalize(const Matrix& E, std::vector<Matrix> A, const Matrix& B, const Matrix& C,
                        Delays tau) {
  if (A.size() != tau.size() + 1) throw DimensionError("canonicalize: A/tau count mismatch");
  for (std::size_t i = 1; i < A.size(); ++i) {
    if (A[i].rows() != A[0].rows() || A[i].cols() != A[0].cols()) {
      throw DimensionError("A_" + std::to_string(i) + " shape differs from A_0");
    }
  }
  std::vector<std::size_t> order(tau.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tau[a] < tau[b]; });

  std::vector<Matrix> merged{A[0]};
  Delays merged_tau;
  for (std::size_t k : order) {
    const double t = tau[k];
    if (t < 0.0 || !std::isfinite(t)) throw DimensionError("delays must be finite and >= 0");
    if (t <= kDelayMergeTol) {
      merged[0] += A[k + 1];
    } else if (!merged_tau.empty() && t - merged_tau.back() <= kDelayMergeTol) {
      merged.back() += A[k + 1];
    } else {
      merged_tau.push_back(t);
      merged.push_back(A[k + 1]);
    }
  }
  return DdaeSystem(E, std::move(merged), B, C, std::move(merged_tau));
}

DdaeSystem canonicalize(const DdaeSystem& sys) {
  return canonicalize(sys.E(), sys.A(), sys.B(), sys.C(), sys.delays());
}

NullspaceBases nullspace_bases(const Matrix& E, double rank_tol) {
  if (E.rows() != E.cols()) throw DimensionError("nullspace_bases: E must be square, got " + shape(E));
  if (!(rank_tol > 0.0)) throw DimensionError("nullspace_bases: rank_tol must be > 0");
  const auto n = E.rows();
  Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  int rank = 0;
  if (n > 0 && s(0) > 0.0) {
    const double threshold = rank_tol * s(0);
    while (rank < n && s(rank) >= threshold) ++rank;
  }
  const auto nu = n - rank;
  NullspaceBases out;
  out.rank = rank;
  out.Uperp = svd.matrixU().leftCols(rank);
  out.U = svd.matrixU().rightCols(nu);
  out.Vperp = svd.matrixV().leftCols(rank);
  out.V = svd.matrixV().rightCols(nu);
  return out;
}

BlockDecomposition decompose(const DdaeSystem& sys, double rank_tol) {
  BlockDecomposition dec;
  dec.rank_tol = rank_tol;
  dec.bases = nullspace_bases(sys.E(), rank_tol);
  const auto& b = dec.bases;

  dec.E11 = b.Uperp.transpose() * sys.E() * b.Vperp;
  if (dec.E11.rows() > 0) {
    const double smin = sigma_min(dec.E11);
    if (!(smin > rank_tol * spectral_norm(sys.E()))) {
      throw DecompositionError("E11 is numerically singular (sigma_min = " + std::to_string(smin) + ")");
    }
  }
  for (const Matrix& Ai : sys.A()) {
    dec.A11.push_back(b.Uperp.transpose() * Ai * b.Vperp);
    dec.A12.push_back(b.Uperp.transpose() * Ai * b.V);
    dec.A21.push_back(b.U.transpose() * Ai * b.Vperp);
    dec.A22.push_back(b.U.transpose() * Ai * b.V);
  }
  dec.B1 = b.Uperp.transpose() * sys.B();
  dec.B2 = b.U.transpose() * sys.B();
  dec.C1 = sys.C() * b.Vperp;
  dec.C2 = sys.C() * b.V;
  return dec;
}

Assumption1Check check_assumption1(const BlockDecomposition& dec, double tol) {
  if (dec.nu() == 0) return {true, std::numeric_limits<double>::infinity()};
  const double margin = sigma_min(dec.A22[0]);
  return {margin > tol, margin};
}

int default_grid_per_dim(int m) {
  if (m <= 2) return 400;
  if (m == 3) return 64;
  if (m == 4) return 16;
  throw PreconditionError("torus grids for m = " + std::to_string(m) +
                          " > 4 delays need an explicit grid size");
}

double check_difference_stability(const BlockDecomposition& dec, int grid_per_dim) {
  const int nu = dec.nu();
  const int m = dec.m();
  if (nu == 0 || m == 0) return 0.0;
  if (!check_assumption1(dec).ok) {
    throw PreconditionError("difference stability needs Assumption 1 (U^T A_0 V nonsingular)");
  }
  if (grid_per_dim < 1) throw DimensionError("grid_per_dim must be >= 1");

  const Eigen::PartialPivLU<Matrix> lu(dec.A22[0]);
  std::vector<CMatrix> scaled;
  for (int i = 1; i <= m; ++i) scaled.push_back(lu.solve(dec.A22[i]).cast<Complex>());

  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  double worst = 0.0;
  CMatrix M(nu, nu);
  for (;;) {
    M.setZero();
    for (int i = 0; i < m; ++i) {
      const double theta = kTwoPi * idx[static_cast<std::size_t>(i)] / grid_per_dim;
      M += scaled[static_cast<std::size_t>(i)] * std::polar(1.0, -theta);
    }
    double rho;
    if (nu == 1) {
      rho = std::abs(M(0, 0));
    } else {
      rho = Eigen::ComplexEigenSolver<CMatrix>(M, false).eigenvalues().cwiseAbs().maxCoeff();
    }
    worst = std::max(worst, rho);

    int d = 0;
    while (d < m && ++idx[static_cast<std::size_t>(d)] == grid_per_dim) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == m) break;
  }
  return worst;
}

AxisScan imaginary_axis_scan(const DdaeSystem& sys, DelaySpan tau, std::span<const double> omegas) {
  check_delays(sys, tau);
  AxisScan scan;
  const Complex j(0.0, 1.0);
  for (double w : omegas) {
    CMatrix M = (j * w) * sys.E().cast<Complex>() - sys.A(0).cast<Complex>();
    for (int i = 1; i <= sys.m(); ++i) {
      M -= sys.A(i).cast<Complex>() * std::polar(1.0, -w * tau[static_cast<std::size_t>(i - 1)]);
    }
    const double s = sigma_min(M);
    if (s < scan.min_sigma) {
      scan.min_sigma = s;
      scan.at_omega = w;
    }
  }
  return scan;
}

ValidationReport validate(const DdaeSystem& sys, const ValidationOptions& opts) {
  ValidationReport report;
  const BlockDecomposition dec = decompose(sys, opts.rank_tol);
  report.rank_E = dec.bases.rank;
  const auto a1 = check_assumption1(dec, opts.assumption1_tol);
  report.assumption1_ok = a1.ok;
  report.assumption1_margin = a1.margin;

  if (dec.nu() == 0) {
    report.messages.push_back("E is nonsingular: Assumption 1 holds vacuously (pure delay differential system)");
  }
  if (!a1.ok) {
    report.messages.push_back("Assumption 1 fails: U^T A_0 V is singular (sigma_min = " +
                              std::to_string(a1.margin) + ")");
    return report;
  }
  const int grid = opts.grid_per_dim > 0 ? opts.grid_per_dim : default_grid_per_dim(sys.m());
  report.difference_stability_margin = check_difference_stability(dec, grid);
  if (report.difference_stability_margin >= 1.0) {
    report.messages.push_back("difference part is not strongly stable (gamma_a = " +
                              std::to_string(report.difference_stability_margin) + " >= 1)");
  }
  return report;
}

}  // namespace ddae
