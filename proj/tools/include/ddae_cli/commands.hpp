#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "ddae/linalg.hpp"

namespace ddae::cli {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

struct CheckArgs {
  std::filesystem::path file;
  bool json = false;
  int grid_per_dim = 0;
};

struct SweepArgs {
  std::filesystem::path file;
  std::string which = "T";  ///< "T" or "Ta"
  std::string grid;         ///< FrequencyGrid spec; ignored with torus
  int torus = 0;            ///< > 0: uniform torus grid of Ta with this many points per axis
  std::filesystem::path out = "-";
  std::string format;       ///< "csv", "json" or empty (from the extension of out)
  std::optional<Delays> delays;
};

struct NormArgs {
  std::filesystem::path file;
  std::string kind = "strong";  ///< "hinf", "strong-ta" or "strong"
  double tol = 1e-4;
  bool json = false;
  std::optional<Delays> delays;
  double omega_cap = 0.0;
  int grid_per_dim = 0;
};

struct PerturbArgs {
  std::filesystem::path file;
  double epsilon = 0.0;
  std::string scheme = "deterministic-rational";  ///< or "random-uniform"
  int count = 8;
  std::uint64_t seed = 1;
  std::int64_t max_denominator = 10'000;
  double tol = 1e-4;
  std::filesystem::path out = "-";
  std::string format;
  std::optional<Delays> delays;  ///< ball center; defaults to the file's delays
};

struct BuildArgs {
  std::filesystem::path file;
  std::filesystem::path out = "-";
};

// Each command writes its report to `out`, diagnostics to `err`, and returns
// an ExitCode. Library and schema exceptions are caught and mapped to exit
// codes here; nothing escapes.
int run_check(const CheckArgs& args, std::ostream& out, std::ostream& err);
int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int run_norm(const NormArgs& args, std::ostream& out, std::ostream& err);
int run_perturb(const PerturbArgs& args, std::ostream& out, std::ostream& err);
int run_build(const BuildArgs& args, std::ostream& out, std::ostream& err);

/// Runs body and maps exceptions: schema, I/O, dimension and precondition
/// errors to kExitUsage, numerical errors to kExitNumerical.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace ddae::cli
