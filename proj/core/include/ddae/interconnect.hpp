#pragma once

#include <vector>

#include "ddae/system_model.hpp"

namespace ddae {

// Builders that bring interconnections into the standard descriptor form by
// appending slack variables. No builder inverts or eliminates anything, so
// the closed-loop matrices stay affine in the controller data. Slack states
// are always appended after the existing states. Every output is
// canonicalized (delays sorted, duplicates merged, zero delays folded).

/// Plant  x' = A x + B1 u + B2 w,  y = C x + D1 u,  z = F x.
struct PlantBlock {
  Matrix A, B1, B2, C, D1, F;

  int states() const { return static_cast<int>(A.rows()); }
  int controls() const { return static_cast<int>(B1.cols()); }
  int measurements() const { return static_cast<int>(C.rows()); }
  void validate() const;
};

/// u(t) = K y(t - tau).
struct StaticDelayController {
  Matrix K;
  double tau = 0.0;
};

/// Feedback loop with state X = [x; u; y]:
///   diag(I,0,0) X' = [A B1 0; C D1 -I; 0 I 0] X + [0 0 0; 0 0 0; 0 0 -K] X(t - tau) + [B2; 0; 0] w
///   z = [F 0 0] X
/// tau = 0 folds the -K block into A_0.
DdaeSystem close_feedback(const PlantBlock& plant, const StaticDelayController& ctrl);

/// Removes a direct term z = C x + D2 w with a slack gamma_w = w:
/// X = [x; gamma_w], E = diag(E, 0), A_0 = diag(A_0, -I), B = [B; I], C = [C D2].
DdaeSystem eliminate_feedthrough(const DdaeSystem& sys, const Matrix& D2);

enum class IoPath { Input, Output };

/// Input: adds a path B2 w(t - tau) to the state equation.
///   X = [x; gamma_w], A_0 = [A_0 B; 0 -I], A_tau = [0 B2; 0 0], B = [0; I], C = [C 0].
/// Output: adds C2 x(t - tau) to z.
///   X = [x; gamma_z], A_0 = [A_0 0; C -I], A_tau = [0 0; C2 0], B = [B; 0], C = [0 I].
DdaeSystem absorb_io_delay(const DdaeSystem& sys, IoPath which, const Matrix& delayed, double tau);

struct DelayedTerm {
  Matrix M;
  double tau = 0.0;
};

/// d/dt (x + sum_k D_k x(t - h_k)) = A0 x + sum_k A_k x(t - r_k) + B w,  z = C x.
struct NeutralSystem {
  Matrix A0;
  std::vector<DelayedTerm> neutral;   ///< (D_k, h_k)
  std::vector<DelayedTerm> retarded;  ///< (A_k, r_k)
  Matrix B, C;
};

/// X = [x; gamma_x] with gamma_x = x + sum D_k x(t - h_k):
///   [0 I; 0 0] X' = [A0 0; I -I] X + sum_k [0 0; D_k 0] X(t - h_k)
///                   + sum_k [A_k 0; 0 0] X(t - r_k) + [B; 0] w
///   z = [C 0] X
DdaeSystem from_neutral(const NeutralSystem& sys);

/// Single neutral and single retarded term.
DdaeSystem from_neutral(const Matrix& D, double tau1, const Matrix& A0, const Matrix& A1,
                        double tau2, const Matrix& B, const Matrix& C);

/// Plant seen from w to z with the control loop open, as an ODE system (E = I).
DdaeSystem open_loop(const PlantBlock& plant);

}  // namespace ddae
