#include "ddae/linalg.hpp"

#include <limits>

#include <Eigen/SVD>

namespace ddae {

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

Vector singular_values(const CMatrix& m) {
  if (m.size() == 0) return Vector();
  return Eigen::JacobiSVD<CMatrix>(m).singularValues();
}

double sigma_max(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

double sigma_min(const Matrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  const Vector s = Eigen::JacobiSVD<Matrix>(m).singularValues();
  return s(s.size() - 1);
}

double sigma_min(const CMatrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  if (m.size() == 1) return std::abs(m(0, 0));
  const Vector s = Eigen::JacobiSVD<CMatrix>(m).singularValues();
  return s(s.size() - 1);
}

}  // namespace ddae
