#include "ddae/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

#include "ddae/errors.hpp"

namespace ddae {

namespace {

double distance(DelaySpan a, DelaySpan b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

bool admissible(const Delays& tau, const PerturbationStudy& study) {
  return std::all_of(tau.begin(), tau.end(), [](double t) { return t > 0.0; }) &&
         distance(tau, study.center) < study.epsilon;
}

std::string fmt(double v) { return nlohmann::json(v).dump(); }

const char* status_name(PerturbationRecord::Status s) {
  return s == PerturbationRecord::Status::Ok ? "ok" : "solver-failure";
}

}  // namespace

Delays commensurate_approximation(DelaySpan tau, std::int64_t s) {
  if (s < 1) throw DimensionError("commensurate_approximation: s must be >= 1");
  Delays out;
  for (double t : tau) {
    const double n = std::round(t * static_cast<double>(s));
    if (n <= 0.0) throw DimensionError("commensurate_approximation: a delay rounds to 0 at s = " + std::to_string(s));
    out.push_back(n / static_cast<double>(s));
  }
  return out;
}

std::vector<Delays> sample_delays(const PerturbationStudy& study) {
  if (!(study.epsilon > 0.0)) throw DimensionError("perturbation radius epsilon must be > 0");
  if (study.count < 1) throw DimensionError("perturbation count must be >= 1");
  if (study.center.empty()) throw DimensionError("perturbation study needs at least one delay");
  std::vector<Delays> out;
  const auto want = static_cast<std::size_t>(study.count);

  if (study.scheme == SampleScheme::DeterministicRational) {
    auto push = [&](const Delays& tau) {
      if (out.size() < want && admissible(tau, study) && std::find(out.begin(), out.end(), tau) == out.end()) {
        out.push_back(tau);
      }
    };
    for (std::int64_t s = 10; s <= study.max_denominator && out.size() < want; s *= 10) {
      Delays base;
      try {
        base = commensurate_approximation(study.center, s);
      } catch (const DimensionError&) {
        continue;
      }
      push(base);
      for (std::size_t i = 0; i < base.size(); ++i) {
        for (double sign : {-1.0, 1.0}) {
          Delays shifted = base;
          shifted[i] = (std::round(base[i] * static_cast<double>(s)) + sign) / static_cast<double>(s);
          push(shifted);
        }
      }
    }
    return out;
  }

  std::mt19937_64 rng(study.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto m = study.center.size();
  for (int attempt = 0; out.size() < want && attempt < 1000 * study.count; ++attempt) {
    Delays dir(m);
    double norm = 0.0;
    for (auto& d : dir) {
      d = normal(rng);
      norm += d * d;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double radius = study.epsilon * std::pow(unit(rng), 1.0 / static_cast<double>(m));
    Delays tau = study.center;
    for (std::size_t i = 0; i < m; ++i) tau[i] += radius * dir[i] / norm;
    if (admissible(tau, study)) out.push_back(std::move(tau));
  }
  return out;
}

PerturbationStudy run_perturbation_study(const DdaeSystem& sys, const BlockDecomposition& dec,
                                         PerturbationStudy study, const HinfOptions& opts) {
  if (static_cast<int>(study.center.size()) != sys.m()) {
    throw DimensionError("study center needs " + std::to_string(sys.m()) + " delays");
  }
  study.records.clear();
  // Records run one after another; each norm computation parallelizes its
  // own scan.
  for (Delays& tau : sample_delays(study)) {
    PerturbationRecord rec;
    rec.tau = std::move(tau);
    try {
      const NormResult r = hinf_norm_T(sys, dec, rec.tau, opts);
      rec.hinf = r.value;
      rec.peak_omega = r.omega.value_or(0.0);
    } catch (const Error& e) {
      rec.status = PerturbationRecord::Status::SolverFailure;
      rec.message = e.what();
    }
    study.records.push_back(std::move(rec));
  }
  return study;
}

std::optional<PerturbationRecord> PerturbationStudy::max_record() const {
  std::optional<PerturbationRecord> best;
  for (const auto& r : records) {
    if (r.status != PerturbationRecord::Status::Ok) continue;
    if (!best || r.hinf > best->hinf) best = r;
  }
  return best;
}

std::string PerturbationStudy::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < center.size(); ++i) os << "tau_" << i + 1 << ',';
  os << "hinf,peak_omega,status\n";
  for (const auto& r : records) {
    for (double t : r.tau) os << fmt(t) << ',';
    if (r.status == PerturbationRecord::Status::Ok) {
      os << fmt(r.hinf) << ',' << fmt(r.peak_omega);
    } else {
      os << ',';
    }
    os << ',' << status_name(r.status) << '\n';
  }
  return os.str();
}

std::string PerturbationStudy::to_json() const {
  nlohmann::ordered_json j;
  j["center"] = center;
  j["epsilon"] = epsilon;
  j["scheme"] = scheme == SampleScheme::DeterministicRational ? "deterministic-rational" : "random-uniform";
  j["count"] = count;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json row;
    row["tau"] = r.tau;
    row["status"] = status_name(r.status);
    if (r.status == PerturbationRecord::Status::Ok) {
      row["hinf"] = r.hinf;
      row["peak_omega"] = r.peak_omega;
    } else {
      row["message"] = r.message;
    }
    arr.push_back(std::move(row));
  }
  j["records"] = std::move(arr);
  if (const auto best = max_record()) j["max_hinf"] = best->hinf;
  return j.dump(2);
}

IndependenceVerdict rational_independence_probe(DelaySpan tau, int cap, bool allow_large) {
  const auto m = tau.size();
  if (m == 0) throw PreconditionError("rational_independence_probe needs at least one delay");
  if (m > 3 && !allow_large) throw PreconditionError("exhaustive relation search is limited to m <= 3 delays");
  if (cap < 1) throw DimensionError("denominator cap must be >= 1");

  IndependenceVerdict verdict;
  int best_shell = cap + 1;
  std::vector<std::int64_t> z(m, -cap);
  for (;;) {
    int shell = 0;
    std::size_t first_nonzero = m;
    for (std::size_t k = 0; k < m; ++k) {
      shell = std::max(shell, static_cast<int>(std::abs(z[k])));
      if (first_nonzero == m && z[k] != 0) first_nonzero = k;
    }
    if (first_nonzero < m && z[first_nonzero] > 0 && shell < best_shell) {
      double sum = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        sum += static_cast<double>(z[k]) * tau[k];
        scale += std::abs(static_cast<double>(z[k]) * tau[k]);
      }
      if (std::abs(sum) <= 1e-12 * scale) {
        best_shell = shell;
        verdict.dependent = true;
        verdict.witness = z;
      }
    }
    std::size_t d = m;
    while (d-- > 0) {
      if (++z[d] <= cap) break;
      z[d] = -cap;
    }
    if (d == static_cast<std::size_t>(-1)) break;
  }
  return verdict;
}

}  // namespace ddae
