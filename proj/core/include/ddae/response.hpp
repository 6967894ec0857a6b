#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddae/system_model.hpp"

namespace ddae {

/// Reciprocal condition estimate below which a characteristic or torus
/// matrix is treated as singular.
inline constexpr double kSingularRcond = 1e-14;

struct FrequencyGrid {
  enum class Kind { Linear, Logarithmic };

  Kind kind = Kind::Linear;
  double omega_min = 0.0;
  double omega_max = 1.0;
  int count = 2;

  /// Throws DimensionError on omega_min >= omega_max, count < 2, negative
  /// frequencies or a logarithmic grid touching 0.
  void validate() const;
  std::vector<double> points() const;
  /// "lin:0:5:2001" / "log:1:10000:2001"
  std::string describe() const;
  static FrequencyGrid parse(const std::string& spec);
};

/// T(jw) = C (jw E - A_0 - sum A_i e^{-jw tau_i})^{-1} B.
/// Throws EvaluationError (where = {omega}) when jw is numerically a
/// characteristic root.
CMatrix eval_T(const DdaeSystem& sys, double omega, DelaySpan tau);
CMatrix eval_T(const DdaeSystem& sys, double omega);

/// T_a(jw) = -C2 (sum_i A22[i] e^{-jw tau_i})^{-1} B2 with tau_0 = 0.
/// Zero p_out x p_in matrix when nu = 0.
CMatrix eval_Ta(const BlockDecomposition& dec, double omega, DelaySpan tau);

/// Torus form: C2 (-A22[0] - sum_{i>=1} A22[i] e^{-j theta_i})^{-1} B2.
CMatrix eval_Ta_torus(const BlockDecomposition& dec, std::span<const double> theta);

/// Sampled singular-value curve. Samples that hit a singularity keep their
/// parameter, have ok = false and an empty sigma vector.
struct SvCurve {
  enum class Axis { Frequency, Torus };

  struct Sample {
    std::vector<double> param;  ///< {omega} or {theta_1..theta_m}
    std::vector<double> sigma;  ///< nonincreasing
    bool ok = true;
    std::string error;
  };

  Axis axis = Axis::Frequency;
  std::vector<Sample> samples;
  std::string system_hash;
  std::string grid_spec;
  std::string quantity;  ///< "T" or "Ta"

  /// Index of the sample with the largest sigma_1 (smallest parameter wins
  /// ties); nullopt when no sample succeeded.
  std::optional<std::size_t> argmax() const;

  /// CSV with header "omega,sigma_1,...,sigma_k" (torus: "theta_1,...").
  /// Gaps are written as empty fields.
  std::string to_csv() const;
  std::string to_json() const;
};

enum class Quantity { T, Ta };

/// Stable 64-bit FNV-1a digest of the system matrices and delays, hex encoded.
std::string system_hash(const DdaeSystem& sys);

/// Frequency sweep over omega >= 0 in grid order.
SvCurve sweep(const DdaeSystem& sys, const BlockDecomposition& dec, const FrequencyGrid& grid,
              Quantity which, DelaySpan tau);
SvCurve sweep(const DdaeSystem& sys, const FrequencyGrid& grid, Quantity which);

/// Uniform torus grid {2 pi k / N}^m of the torus function.
SvCurve sweep_torus(const BlockDecomposition& dec, int grid_per_dim);

}  // namespace ddae
