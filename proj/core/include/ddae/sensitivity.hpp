#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddae/norms.hpp"

namespace ddae {

enum class SampleScheme { DeterministicRational, RandomUniform };

struct PerturbationRecord {
  enum class Status { Ok, SolverFailure };

  Delays tau;
  double hinf = 0.0;
  double peak_omega = 0.0;
  Status status = Status::Ok;
  std::string message;
};

/// Delay vectors sampled in the open ball B(center, epsilon) intersected
/// with the positive orthant, with the H-infinity norm at each.
struct PerturbationStudy {
  Delays center;
  double epsilon = 0.0;
  SampleScheme scheme = SampleScheme::DeterministicRational;
  int count = 8;
  std::uint64_t seed = 1;  ///< RandomUniform only
  /// Largest denominator tried by DeterministicRational.
  std::int64_t max_denominator = 10'000;
  std::vector<PerturbationRecord> records;

  /// Record with the largest hinf among successful ones.
  std::optional<PerturbationRecord> max_record() const;
  std::string to_csv() const;
  std::string to_json() const;
};

/// Sample delay vectors for the study (without evaluating anything).
/// DeterministicRational walks s = 10, 100, ... up to max_denominator; for
/// each s it emits the commensurate approximation round(tau s)/s and then
/// shifts of one component by -1/s and +1/s, keeping only points inside the
/// ball and dropping duplicates. RandomUniform draws uniformly in the ball.
std::vector<Delays> sample_delays(const PerturbationStudy& study);

/// Fills study.records; failures are recorded, never thrown.
PerturbationStudy run_perturbation_study(const DdaeSystem& sys, const BlockDecomposition& dec,
                                         PerturbationStudy study, const HinfOptions& opts = {});

/// (round(tau_1 s)/s, ..., round(tau_m s)/s). Throws DimensionError if a
/// component rounds to 0 or s < 1.
Delays commensurate_approximation(DelaySpan tau, std::int64_t s);

struct IndependenceVerdict {
  bool dependent = false;
  /// Integer relation sum z_k tau_k = 0 when dependent; first nonzero entry
  /// positive.
  std::vector<std::int64_t> witness;
};

/// Exhaustive search for an integer relation with |z_k| <= cap, in order of
/// increasing max |z_k|. Never certifies independence; "not dependent" only
/// means no relation up to the cap. Throws PreconditionError for m > 3 unless
/// allow_large is set, and for m = 0.
IndependenceVerdict rational_independence_probe(DelaySpan tau, int cap, bool allow_large = false);

}  // namespace ddae
