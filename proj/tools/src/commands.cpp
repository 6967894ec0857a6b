#include "ddae_cli/commands.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "ddae/norms.hpp"
#include "ddae/response.hpp"
#include "ddae/sensitivity.hpp"
#include "ddae/system_model.hpp"
#include "ddae_cli/interconnect_file.hpp"
#include "ddae_cli/io.hpp"

namespace ddae::cli {

using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return nlohmann::json(v).dump();
}

std::string fmt(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

bool wants_json(const std::string& format, const std::filesystem::path& out) {
  if (format == "json") return true;
  if (format == "csv") return false;
  if (!format.empty()) throw DimensionError("unknown format '" + format + "' (expected csv or json)");
  return out.extension() == ".json";
}

// "-" goes to the command's own stream so callers can capture it.
void emit(const std::filesystem::path& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

Delays delays_for(const DdaeSystem& sys, const std::optional<Delays>& override) {
  Delays tau = override ? *override : sys.delays();
  check_delays(sys, tau);
  return tau;
}

std::string label(const SystemDocument& doc) {
  return doc.metadata.name.empty() ? system_hash(doc.system) : doc.metadata.name + " (" + system_hash(doc.system) + ")";
}

}  // namespace

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

int run_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const SystemDocument doc = read_system_file(args.file);
        const DdaeSystem& sys = doc.system;
        ValidationOptions opts;
        opts.grid_per_dim = args.grid_per_dim;
        const ValidationReport report = validate(sys, opts);
        const int nu = sys.n() - report.rank_E;

        if (args.json) {
          ordered_json j;
          j["system"] = label(doc);
          j["n"] = sys.n();
          j["m"] = sys.m();
          j["rank_E"] = report.rank_E;
          j["nu"] = nu;
          j["assumption1_ok"] = report.assumption1_ok;
          j["assumption1_margin"] = std::isfinite(report.assumption1_margin) ? ordered_json(report.assumption1_margin)
                                                                            : ordered_json(nullptr);
          j["gamma_a"] = std::isfinite(report.difference_stability_margin)
                             ? ordered_json(report.difference_stability_margin)
                             : ordered_json(nullptr);
          j["messages"] = report.messages;
          j["passed"] = report.passed();
          out << j.dump(2) << '\n';
        } else {
          out << "system: " << label(doc) << '\n';
          out << "n = " << sys.n() << ", m = " << sys.m() << ", inputs = " << sys.inputs()
              << ", outputs = " << sys.outputs() << '\n';
          out << "rank(E) = " << report.rank_E << " (nu = " << nu << ")\n";
          out << "assumption 1: " << (report.assumption1_ok ? "holds" : "FAILS") << " (margin "
              << fmt(report.assumption1_margin) << ")\n";
          if (!std::isnan(report.difference_stability_margin)) {
            out << "gamma_a = " << fmt(report.difference_stability_margin) << '\n';
          }
          for (const auto& msg : report.messages) out << "note: " << msg << '\n';
          out << "result: " << (report.passed() ? "pass" : "fail") << '\n';
        }
        return report.passed() ? kExitOk : kExitNumerical;
      },
      err);
}

int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const bool as_json = wants_json(args.format, args.out);
        const SystemDocument doc = read_system_file(args.file);
        const DdaeSystem& sys = doc.system;
        if (args.which != "T" && args.which != "Ta") throw DimensionError("--which must be T or Ta");
        SvCurve curve;
        if (args.torus > 0) {
          if (args.which != "Ta") throw DimensionError("--torus applies to --which Ta only");
          curve = sweep_torus(decompose(sys), args.torus);
          curve.system_hash = system_hash(sys);
        } else {
          if (args.grid.empty()) throw DimensionError("--grid is required for frequency sweeps");
          const FrequencyGrid grid = FrequencyGrid::parse(args.grid);
          const Delays tau = delays_for(sys, args.delays);
          curve = sweep(sys, decompose(sys), grid, args.which == "T" ? Quantity::T : Quantity::Ta, tau);
        }
        emit(args.out, as_json ? curve.to_json() + "\n" : curve.to_csv(), out);
        if (const auto best = curve.argmax(); best && args.out != "-") {
          const auto& s = curve.samples[*best];
          out << "max sigma_1 = " << fmt(s.sigma.front()) << " at " << fmt(s.param) << '\n';
        }
        std::size_t gaps = 0;
        for (const auto& s : curve.samples) gaps += s.ok ? 0 : 1;
        if (gaps > 0) err << "warning: " << gaps << " samples hit a singular matrix and were left empty\n";
        return kExitOk;
      },
      err);
}

int run_norm(const NormArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const SystemDocument doc = read_system_file(args.file);
        const DdaeSystem& sys = doc.system;
        if (!(args.tol > 0.0)) throw DimensionError("--tol must be > 0");
        const BlockDecomposition dec = decompose(sys);
        HinfOptions opts;
        opts.rel_tol = args.tol;
        opts.omega_cap = args.omega_cap;
        opts.torus.grid_per_dim = args.grid_per_dim;

        NormResult r;
        if (args.kind == "strong-ta") {
          r = strong_norm_Ta(dec, opts.torus);
        } else if (args.kind == "hinf") {
          r = hinf_norm_T(sys, dec, delays_for(sys, args.delays), opts);
        } else if (args.kind == "strong") {
          r = strong_hinf_norm_T(sys, dec, delays_for(sys, args.delays), opts);
        } else {
          throw DimensionError("--kind must be hinf, strong-ta or strong");
        }

        if (args.json) {
          out << r.to_json() << '\n';
        } else {
          out << "system: " << label(doc) << '\n';
          out << "kind: " << args.kind << '\n';
          out << "value: " << fmt(r.value) << '\n';
          out << "branch: " << to_string(r.branch) << (r.tie ? " (tie)" : "") << '\n';
          if (r.omega) {
            out << "attained at: omega = " << fmt(*r.omega) << '\n';
          } else {
            out << "attained at: theta = " << fmt(r.theta) << '\n';
          }
          if (r.diagnostics.asymptotic_limit) out << "note: value is the high-frequency limit; not attained\n";
          if (r.diagnostics.cap_clamped) out << "note: frequency scan clamped at omega = " << fmt(r.diagnostics.omega_cap) << '\n';
        }
        return kExitOk;
      },
      err);
}

int run_perturb(const PerturbArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const bool as_json = wants_json(args.format, args.out);
        if (!(args.epsilon > 0.0)) throw DimensionError("--epsilon must be > 0");
        const SystemDocument doc = read_system_file(args.file);
        const DdaeSystem& sys = doc.system;
        PerturbationStudy study;
        study.center = delays_for(sys, args.delays);
        study.epsilon = args.epsilon;
        if (args.scheme == "deterministic-rational") {
          study.scheme = SampleScheme::DeterministicRational;
        } else if (args.scheme == "random-uniform") {
          study.scheme = SampleScheme::RandomUniform;
        } else {
          throw DimensionError("--scheme must be deterministic-rational or random-uniform");
        }
        study.count = args.count;
        study.seed = args.seed;
        study.max_denominator = args.max_denominator;
        HinfOptions opts;
        opts.rel_tol = args.tol;
        study = run_perturbation_study(sys, decompose(sys), study, opts);

        emit(args.out, as_json ? study.to_json() + "\n" : study.to_csv(), out);
        std::size_t failures = 0;
        for (const auto& r : study.records) failures += r.status == PerturbationRecord::Status::Ok ? 0 : 1;
        if (args.out != "-") {
          out << study.records.size() << " records";
          if (const auto best = study.max_record()) {
            out << ", max hinf = " << fmt(best->hinf) << " at tau = " << fmt(best->tau) << ", omega = "
                << fmt(best->peak_omega);
          }
          out << '\n';
        }
        if (failures > 0) err << "warning: " << failures << " records failed\n";
        return kExitOk;
      },
      err);
}

int run_build(const BuildArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        emit(args.out, dump_system(build_from_file(args.file)), out);
        return kExitOk;
      },
      err);
}

}  // namespace ddae::cli
