#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddae/response.hpp"

namespace ddae {

enum class Branch { PlainT, AsymptoticTa };

const char* to_string(Branch b);

struct NormDiagnostics {
  int iterations = 0;              ///< level-set iterations or torus ascent sweeps
  std::size_t grid_points = 0;     ///< samples evaluated on the scan grid
  int grid_per_dim = 0;            ///< torus resolution
  int refinements = 0;             ///< local grid-doubling passes
  double omega_cap = 0.0;          ///< Omega used for the frequency scan
  bool cap_clamped = false;        ///< Omega hit max_grid_points / omega_cap override
  bool seed_level_crossed = false; ///< sigma_1(T) exceeds the asymptotic seed level
  bool asymptotic_limit = false;   ///< value comes from the high-frequency limit of T_a
  double asymptotic_sup = 0.0;     ///< sup of sigma_1(T_a(jw)) over the scanned range
  double plain_value = 0.0;        ///< strong norm only: ||T||
  double asymptotic_value = 0.0;   ///< strong norm only: strong norm of T_a
  std::vector<double> level_history;
};

struct NormResult {
  double value = 0.0;
  Branch branch = Branch::PlainT;
  /// Set for frequency attainment.
  std::optional<double> omega;
  /// Set for torus attainment (may be empty when m = 0).
  std::vector<double> theta;
  bool tie = false;
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  NormDiagnostics diagnostics;

  /// Fields as named above, numbers in shortest round-trip form.
  std::string to_json() const;
};

/// Snapshot of one level-set iteration.
struct LevelSetState {
  double level = 0.0;
  std::vector<double> crossings;  ///< sorted; all below omega_cap
  double omega_cap = 0.0;
  int iteration = 0;
};

struct TorusOptions {
  int grid_per_dim = 0;       ///< 0: default_grid_per_dim(m)
  double refine_tol = 1e-10;  ///< final step of the coordinate ascent
};

/// max over theta in [0, 2 pi]^m of sigma_1 of the torus function: uniform
/// grid, then coordinate-wise golden-section ascent from the best grid point.
/// Depends on the decomposition only, never on delay values.
/// Throws UnboundedNormError if the torus matrix is singular on the grid.
NormResult strong_norm_Ta(const BlockDecomposition& dec, const TorusOptions& opts = {});

/// Omega such that sigma_1(T(jw) - T_a(jw)) < gamma for all w > Omega and
/// every choice of positive delays. Built from the block inverse with the
/// torus bound sup ||(-A22(theta))^{-1}|| estimated on the grid and inflated
/// by a factor 2. Throws AsymptoticDominanceError when gamma_a >= 1.
double frequency_bound(const BlockDecomposition& dec, double gamma, const TorusOptions& opts = {});

struct HinfOptions {
  int points_per_decade = 2001;   ///< relative spacing of the low-frequency log grid
  int samples_per_period = 64;    ///< linear spacing 2 pi / (tau_max * this)
  double rel_tol = 1e-4;          ///< level-set termination and tie tolerance
  double level_margin = 1e-3;     ///< seed level = strong norm of T_a * (1 - margin)
  int max_iterations = 100;
  int max_refinements = 3;        ///< local doubling passes near the top level
  double omega_floor = 1e-3;      ///< first nonzero grid frequency
  double omega_cap = 0.0;         ///< > 0 overrides the computed cap
  std::size_t max_grid_points = 40'000'000;
  TorusOptions torus;
};

/// sup over w >= 0 of sigma_1(T(jw)) at the given delays, by a level-set
/// iteration on a dense scan of [0, Omega] seeded with the strong norm of T_a.
/// Among peaks within rel_tol of the value the lowest frequency is reported.
/// Throws InstabilityError if jw hits a characteristic root,
/// AsymptoticDominanceError if no finite Omega exists, ConvergenceError on
/// iteration overrun.
NormResult hinf_norm_T(const DdaeSystem& sys, const BlockDecomposition& dec, DelaySpan tau,
                       const HinfOptions& opts = {});

/// Like hinf_norm_T, also exposing the per-iteration level-set states.
NormResult hinf_norm_T(const DdaeSystem& sys, const BlockDecomposition& dec, DelaySpan tau,
                       const HinfOptions& opts, std::vector<LevelSetState>* trace);

/// max(||T||, strong norm of T_a). Ties within rel_tol go to AsymptoticTa
/// with tie = true.
NormResult strong_hinf_norm_T(const DdaeSystem& sys, const BlockDecomposition& dec, DelaySpan tau,
                              const HinfOptions& opts = {});

}  // namespace ddae
