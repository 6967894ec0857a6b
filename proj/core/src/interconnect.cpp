#include "ddae/interconnect.hpp"

#include <string>

#include "ddae/errors.hpp"

namespace ddae {

namespace {

void expect(bool cond, const std::string& what) {
  if (!cond) throw DimensionError(what);
}

/// diag(m, zeros(k, k))
Matrix pad(const Matrix& m, Eigen::Index k) {
  Matrix out = Matrix::Zero(m.rows() + k, m.cols() + k);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

}  // namespace

void PlantBlock::validate() const {
  const auto nx = A.rows();
  const auto nu = B1.cols();
  const auto ny = C.rows();
  expect(A.cols() == nx && nx > 0, "plant A must be square and nonempty");
  expect(B1.rows() == nx, "plant B1 must have as many rows as A");
  expect(B2.rows() == nx, "plant B2 must have as many rows as A");
  expect(C.cols() == nx, "plant C must have as many columns as A");
  expect(D1.rows() == ny && D1.cols() == nu, "plant D1 must be (rows of C) x (columns of B1)");
  expect(F.cols() == nx, "plant F must have as many columns as A");
}

DdaeSystem open_loop(const PlantBlock& plant) {
  plant.validate();
  const auto nx = plant.A.rows();
  return DdaeSystem(Matrix::Identity(nx, nx), {plant.A}, plant.B2, plant.F, {});
}

DdaeSystem close_feedback(const PlantBlock& plant, const StaticDelayController& ctrl) {
  plant.validate();
  const auto nx = plant.A.rows();
  const auto nu = plant.B1.cols();
  const auto ny = plant.C.rows();
  expect(ctrl.K.rows() == nu && ctrl.K.cols() == ny, "controller K must be (controls) x (measurements)");
  expect(ctrl.tau >= 0.0, "controller delay must be >= 0");
  const auto n = nx + nu + ny;
  const auto ou = nx;
  const auto oy = nx + nu;

  Matrix E = Matrix::Zero(n, n);
  E.topLeftCorner(nx, nx).setIdentity();

  Matrix A0 = Matrix::Zero(n, n);
  A0.block(0, 0, nx, nx) = plant.A;
  A0.block(0, ou, nx, nu) = plant.B1;
  // 0 = C x + D1 u - y
  A0.block(nx, 0, ny, nx) = plant.C;
  A0.block(nx, ou, ny, nu) = plant.D1;
  A0.block(nx, oy, ny, ny) = -Matrix::Identity(ny, ny);
  // 0 = u - K y(t - tau)
  A0.block(nx + ny, ou, nu, nu) = Matrix::Identity(nu, nu);

  Matrix A1 = Matrix::Zero(n, n);
  A1.block(nx + ny, oy, nu, ny) = -ctrl.K;

  Matrix B = Matrix::Zero(n, plant.B2.cols());
  B.topRows(nx) = plant.B2;
  Matrix C = Matrix::Zero(plant.F.rows(), n);
  C.leftCols(nx) = plant.F;

  return canonicalize(E, {A0, A1}, B, C, {ctrl.tau});
}

DdaeSystem eliminate_feedthrough(const DdaeSystem& sys, const Matrix& D2) {
  expect(D2.rows() == sys.outputs() && D2.cols() == sys.inputs(),
         "D2 must be (outputs) x (inputs) of the system");
  const auto n = sys.n();
  const auto p = sys.inputs();

  std::vector<Matrix> A;
  for (const Matrix& Ai : sys.A()) A.push_back(pad(Ai, p));
  A[0].bottomRightCorner(p, p) = -Matrix::Identity(p, p);

  Matrix B(n + p, p);
  B << sys.B(), Matrix::Identity(p, p);
  Matrix C(sys.outputs(), n + p);
  C << sys.C(), D2;
  return canonicalize(pad(sys.E(), p), std::move(A), B, C, sys.delays());
}

DdaeSystem absorb_io_delay(const DdaeSystem& sys, IoPath which, const Matrix& delayed, double tau) {
  expect(tau > 0.0, "absorb_io_delay: delay must be > 0");
  const auto n = sys.n();
  std::vector<Matrix> A;
  Delays delays = sys.delays();
  Matrix B, C;

  if (which == IoPath::Input) {
    expect(delayed.rows() == n && delayed.cols() == sys.inputs(), "delayed input matrix must be n x (inputs)");
    const auto p = sys.inputs();
    for (const Matrix& Ai : sys.A()) A.push_back(pad(Ai, p));
    A[0].topRightCorner(n, p) = sys.B();
    A[0].bottomRightCorner(p, p) = -Matrix::Identity(p, p);
    Matrix At = Matrix::Zero(n + p, n + p);
    At.topRightCorner(n, p) = delayed;
    A.push_back(At);
    delays.push_back(tau);
    B = Matrix::Zero(n + p, p);
    B.bottomRows(p).setIdentity();
    C = Matrix::Zero(sys.outputs(), n + p);
    C.leftCols(n) = sys.C();
    return canonicalize(pad(sys.E(), p), std::move(A), B, C, delays);
  }

  expect(delayed.rows() == sys.outputs() && delayed.cols() == n, "delayed output matrix must be (outputs) x n");
  const auto q = sys.outputs();
  for (const Matrix& Ai : sys.A()) A.push_back(pad(Ai, q));
  A[0].bottomLeftCorner(q, n) = sys.C();
  A[0].bottomRightCorner(q, q) = -Matrix::Identity(q, q);
  Matrix At = Matrix::Zero(n + q, n + q);
  At.bottomLeftCorner(q, n) = delayed;
  A.push_back(At);
  delays.push_back(tau);
  B = Matrix::Zero(n + q, sys.inputs());
  B.topRows(n) = sys.B();
  C = Matrix::Zero(q, n + q);
  C.rightCols(q).setIdentity();
  return canonicalize(pad(sys.E(), q), std::move(A), B, C, delays);
}

DdaeSystem from_neutral(const NeutralSystem& ns) {
  const auto k = ns.A0.rows();
  expect(k > 0 && ns.A0.cols() == k, "neutral A0 must be square and nonempty");
  expect(ns.B.rows() == k, "neutral B must have as many rows as A0");
  expect(ns.C.cols() == k, "neutral C must have as many columns as A0");
  const auto n = 2 * k;

  Matrix E = Matrix::Zero(n, n);
  E.topRightCorner(k, k).setIdentity();
  Matrix A0 = Matrix::Zero(n, n);
  A0.topLeftCorner(k, k) = ns.A0;
  A0.bottomLeftCorner(k, k).setIdentity();
  A0.bottomRightCorner(k, k) = -Matrix::Identity(k, k);

  std::vector<Matrix> A{A0};
  Delays tau;
  for (const auto& term : ns.neutral) {
    expect(term.M.rows() == k && term.M.cols() == k, "neutral D must match A0");
    expect(term.tau > 0.0, "neutral delays must be > 0");
    Matrix Ad = Matrix::Zero(n, n);
    Ad.bottomLeftCorner(k, k) = term.M;
    A.push_back(Ad);
    tau.push_back(term.tau);
  }
  for (const auto& term : ns.retarded) {
    expect(term.M.rows() == k && term.M.cols() == k, "retarded A_k must match A0");
    expect(term.tau > 0.0, "retarded delays must be > 0");
    Matrix Ad = Matrix::Zero(n, n);
    Ad.topLeftCorner(k, k) = term.M;
    A.push_back(Ad);
    tau.push_back(term.tau);
  }
  Matrix B = Matrix::Zero(n, ns.B.cols());
  B.topRows(k) = ns.B;
  Matrix C = Matrix::Zero(ns.C.rows(), n);
  C.leftCols(k) = ns.C;
  return canonicalize(E, std::move(A), B, C, std::move(tau));
}

DdaeSystem from_neutral(const Matrix& D, double tau1, const Matrix& A0, const Matrix& A1, double tau2,
                        const Matrix& B, const Matrix& C) {
  return from_neutral(NeutralSystem{A0, {{D, tau1}}, {{A1, tau2}}, B, C});
}

}  // namespace ddae
