#include "ddae/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "ddae/errors.hpp"
#include "ddae/parallel.hpp"
#include "evaluator.hpp"
#include "golden.hpp"

namespace ddae {

const char* to_string(Branch b) { return b == Branch::PlainT ? "plain-T" : "asymptotic-Ta"; }

std::string NormResult::to_json() const {
  nlohmann::ordered_json j;
  j["value"] = value;
  j["branch"] = to_string(branch);
  if (omega) {
    j["attained_at"] = {{"omega", *omega}};
  } else {
    j["attained_at"] = {{"theta", theta}};
  }
  j["tie"] = tie;
  j["abs_tol"] = abs_tol;
  j["rel_tol"] = rel_tol;
  const auto& d = diagnostics;
  j["diagnostics"] = {
      {"iterations", d.iterations},
      {"grid_points", d.grid_points},
      {"grid_per_dim", d.grid_per_dim},
      {"refinements", d.refinements},
      {"omega_cap", d.omega_cap},
      {"cap_clamped", d.cap_clamped},
      {"seed_level_crossed", d.seed_level_crossed},
      {"asymptotic_limit", d.asymptotic_limit},
      {"asymptotic_sup", d.asymptotic_sup},
      {"plain_value", d.plain_value},
      {"asymptotic_value", d.asymptotic_value},
      {"level_history", d.level_history},
  };
  return j.dump(2);
}

namespace {

double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

struct TorusGrid {
  int per_dim;
  int dims;
  std::size_t total;

  std::vector<int> index(std::size_t flat) const {
    std::vector<int> k(static_cast<std::size_t>(dims));
    for (int i = 0; i < dims; ++i) {
      k[static_cast<std::size_t>(i)] = static_cast<int>(flat % static_cast<std::size_t>(per_dim));
      flat /= static_cast<std::size_t>(per_dim);
    }
    return k;
  }
  std::vector<double> theta(std::size_t flat) const {
    std::vector<double> t;
    for (int k : index(flat)) t.push_back(kTwoPi * k / per_dim);
    return t;
  }
};

TorusGrid make_torus_grid(int m, int requested) {
  const int per_dim = requested > 0 ? requested : default_grid_per_dim(m);
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(per_dim);
  return {per_dim, m, total};
}

}  // namespace

NormResult strong_norm_Ta(const BlockDecomposition& dec, const TorusOptions& opts) {
  const int m = dec.m();
  NormResult r;
  r.branch = Branch::AsymptoticTa;
  r.abs_tol = opts.refine_tol;
  r.theta.assign(static_cast<std::size_t>(m), 0.0);
  const detail::AsymptoticEvaluator eval(dec);
  if (dec.nu() == 0) return r;

  auto sigma = [&](std::span<const double> theta) {
    try {
      return eval.sigma1_torus(theta);
    } catch (const EvaluationError& e) {
      throw UnboundedNormError(std::string("strong norm of T_a is unbounded: ") + e.what());
    }
  };
  if (m == 0) {
    r.value = sigma({});
    return r;
  }

  const TorusGrid grid = make_torus_grid(m, opts.grid_per_dim);
  std::vector<double> values(grid.total);
  parallel_for(grid.total, [&](std::size_t flat) { values[flat] = sigma(grid.theta(flat)); });

  // Largest value; ties go to the lexicographically smallest theta.
  std::size_t best = 0;
  for (std::size_t f = 1; f < grid.total; ++f) {
    if (values[f] > values[best] || (values[f] == values[best] && grid.index(f) < grid.index(best))) best = f;
  }
  std::vector<double> theta = grid.theta(best);
  double f_best = values[best];

  // Coordinate-wise golden-section ascent; the window halves after a sweep
  // without improvement.
  double h = kTwoPi / grid.per_dim;
  int sweeps = 0;
  constexpr int kMaxSweeps = 2000;
  while (h >= opts.refine_tol && sweeps < kMaxSweeps) {
    ++sweeps;
    bool improved = false;
    for (int i = 0; i < m; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      std::vector<double> probe = theta;
      const double center = theta[idx];
      const auto [t, v] = detail::golden_maximize(
          [&](double x) {
            probe[idx] = x;
            return sigma(probe);
          },
          center - h, center + h, 0.5 * opts.refine_tol);
      if (v > f_best) {
        f_best = v;
        theta[idx] = wrap_angle(t);
        improved = true;
      }
    }
    if (!improved) h *= 0.5;
  }

  r.value = f_best;
  r.theta = theta;
  r.diagnostics.iterations = sweeps;
  r.diagnostics.grid_points = grid.total;
  r.diagnostics.grid_per_dim = grid.per_dim;
  r.diagnostics.asymptotic_value = f_best;
  return r;
}

double frequency_bound(const BlockDecomposition& dec, double gamma, const TorusOptions& opts) {
  if (!(gamma > 0.0)) throw DimensionError("frequency_bound: gamma must be > 0");
  if (dec.E11.rows() == 0) return 0.0;  // E = 0: T and T_a coincide

  const int m = dec.m();
  double kappa = 0.0;
  if (dec.nu() > 0) {
    if (!check_assumption1(dec).ok) throw PreconditionError("frequency_bound needs Assumption 1");
    const TorusGrid grid = make_torus_grid(m, opts.grid_per_dim);
    if (check_difference_stability(dec, grid.per_dim) >= 1.0) {
      throw AsymptoticDominanceError("no finite frequency bound: the difference part is not strongly stable");
    }
    const detail::AsymptoticEvaluator eval(dec);
    std::vector<double> smin(grid.total);
    parallel_for(grid.total, [&](std::size_t f) { smin[f] = eval.torus_sigma_min(grid.theta(f)); });
    const double worst = *std::min_element(smin.begin(), smin.end());
    if (!(worst > 0.0)) throw AsymptoticDominanceError("torus matrix is singular on the grid");
    kappa = 2.0 / worst;
  }

  auto coeff_sum = [](const std::vector<Matrix>& blocks) {
    double s = 0.0;
    for (const Matrix& b : blocks) s += spectral_norm(b);
    return s;
  };
  const double e = 1.0 / sigma_min(dec.E11);
  const double a11 = coeff_sum(dec.A11);
  const double a12 = coeff_sum(dec.A12);
  const double a21 = coeff_sum(dec.A21);
  const double left = spectral_norm(dec.C1) + spectral_norm(dec.C2) * kappa * a21;
  const double right = spectral_norm(dec.B1) + a12 * kappa * spectral_norm(dec.B2);
  const double shift = e * (a11 + a12 * kappa * a21);
  // sigma_1(T - T_a) <= left * right * e / (w - shift) for w > shift
  return shift + left * right * e / gamma;
}

namespace {

struct Sample {
  double omega;
  double value;
};

std::vector<double> scan_frequencies(double cap, double floor, int points_per_decade, double h_abs) {
  std::vector<double> pts{0.0};
  const double growth = std::pow(10.0, 1.0 / points_per_decade) - 1.0;
  double w = std::min(floor, cap);
  while (w < cap) {
    pts.push_back(w);
    w += std::min(w * growth, h_abs);
  }
  pts.push_back(cap);
  return pts;
}

std::size_t estimate_scan_size(double cap, double floor, int points_per_decade, double h_abs) {
  const double growth = std::pow(10.0, 1.0 / points_per_decade) - 1.0;
  const double switch_at = std::isfinite(h_abs) ? h_abs / growth : cap;
  double count = 2.0;
  if (cap > floor) {
    const double log_end = std::min(cap, std::max(switch_at, floor));
    count += std::log(log_end / floor) / std::log1p(growth);
    if (cap > log_end) count += (cap - log_end) / h_abs;
  }
  return static_cast<std::size_t>(count);
}

class LevelSetSolver {
 public:
  LevelSetSolver(const detail::TransferEvaluator& eval, const HinfOptions& opts) : eval_(eval), opts_(opts) {}

  double sigma(double w) const {
    try {
      return eval_.sigma1(w);
    } catch (const EvaluationError& e) {
      throw InstabilityError(std::string("characteristic root on the imaginary axis: ") + e.what(), w);
    }
  }

  std::vector<Sample> evaluate(const std::vector<double>& omegas) const {
    std::vector<Sample> out(omegas.size());
    parallel_for(omegas.size(), [&](std::size_t k) { out[k] = {omegas[k], sigma(omegas[k])}; });
    return out;
  }

  /// Inserts midpoints into every cell whose larger endpoint reaches the
  /// band below the current maximum.
  int refine_near_top(std::vector<Sample>& s, double band) const {
    double top = 0.0;
    for (const auto& x : s) top = std::max(top, x.value);
    const double threshold = top * (1.0 - band);
    std::vector<double> mids;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      if (std::max(s[k].value, s[k + 1].value) >= threshold) mids.push_back(0.5 * (s[k].omega + s[k + 1].omega));
    }
    if (mids.empty()) return 0;
    const std::vector<Sample> extra = evaluate(mids);
    std::vector<Sample> merged;
    merged.reserve(s.size() + extra.size());
    std::merge(s.begin(), s.end(), extra.begin(), extra.end(), std::back_inserter(merged),
               [](const Sample& a, const Sample& b) { return a.omega < b.omega; });
    s = std::move(merged);
    return 1;
  }

  /// Frequency in (lo, hi) where sigma_1 crosses `level`; lo is on the
  /// `below_at_lo` side.
  double bisect(double lo, double hi, double level, bool below_at_lo) const {
    for (int it = 0; it < 60 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool below = sigma(mid) <= level;
      if (below == below_at_lo) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  struct Interval {
    double left, right;
    double best_omega, best_value;  ///< best sample inside
  };

  /// Maximal intervals where sigma_1 > level, endpoints located by bisection.
  std::vector<Interval> intervals_above(const std::vector<Sample>& s, double level) const {
    std::vector<Interval> out;
    std::size_t k = 0;
    while (k < s.size()) {
      if (s[k].value <= level) {
        ++k;
        continue;
      }
      const std::size_t first = k;
      Interval iv{0.0, 0.0, s[k].omega, s[k].value};
      while (k < s.size() && s[k].value > level) {
        if (s[k].value > iv.best_value) iv.best_value = s[k].value, iv.best_omega = s[k].omega;
        ++k;
      }
      iv.left = first == 0 ? s.front().omega : bisect(s[first - 1].omega, s[first].omega, level, true);
      iv.right = k == s.size() ? s.back().omega : bisect(s[k - 1].omega, s[k].omega, level, false);
      out.push_back(iv);
    }
    return out;
  }

 private:
  const detail::TransferEvaluator& eval_;
  const HinfOptions& opts_;
};

NormResult hinf_impl(const DdaeSystem& sys, const BlockDecomposition& dec, DelaySpan tau, const HinfOptions& opts,
                     double strong_ta, std::vector<LevelSetState>* trace) {
  check_delays(sys, tau);
  if (!(opts.rel_tol > 0.0)) throw DimensionError("rel_tol must be > 0");
  if (opts.points_per_decade < 2 || opts.samples_per_period < 2) throw DimensionError("grid densities must be >= 2");

  const detail::TransferEvaluator t_eval(sys, tau);
  const detail::AsymptoticEvaluator a_eval(dec);
  const LevelSetSolver solver(t_eval, opts);
  const double tol = opts.rel_tol;

  NormResult r;
  r.branch = Branch::PlainT;
  r.rel_tol = tol;
  auto& diag = r.diagnostics;

  // Coarse probe: sets the reference level for the frequency cap.
  std::vector<double> probe{0.0};
  for (double e = std::log10(opts.omega_floor); e <= 3.0 + 1e-9; e += 0.05) probe.push_back(std::pow(10.0, e));
  const std::vector<Sample> probe_samples = solver.evaluate(probe);
  double coarse_max = 0.0;
  for (const auto& s : probe_samples) coarse_max = std::max(coarse_max, s.value);

  // Beyond Omega, sigma_1(T) <= sigma_1(T_a) + gamma <= strong_ta + gamma.
  double gamma = tol * coarse_max;
  gamma = std::max(gamma, coarse_max * (1.0 + tol) - strong_ta);
  if (!(gamma > 0.0)) gamma = tol;
  double cap = opts.omega_cap > 0.0 ? opts.omega_cap : frequency_bound(dec, gamma, opts.torus);
  cap = std::max(cap, 1.0);

  const double tau_max = tau.empty() ? 0.0 : *std::max_element(tau.begin(), tau.end());
  const double h_abs =
      tau_max > 0.0 ? kTwoPi / (tau_max * opts.samples_per_period) : std::numeric_limits<double>::infinity();
  if (estimate_scan_size(cap, opts.omega_floor, opts.points_per_decade, h_abs) > opts.max_grid_points) {
    double lo = 1.0, hi = cap;
    for (int it = 0; it < 100; ++it) {
      const double mid = std::sqrt(lo * hi);
      (estimate_scan_size(mid, opts.omega_floor, opts.points_per_decade, h_abs) > opts.max_grid_points ? hi : lo) = mid;
    }
    cap = lo;
    diag.cap_clamped = true;
  }
  diag.omega_cap = cap;
  r.abs_tol = gamma;

  std::vector<double> omegas = scan_frequencies(cap, opts.omega_floor, opts.points_per_decade, h_abs);
  for (double w : probe) omegas.push_back(w);
  std::sort(omegas.begin(), omegas.end());
  omegas.erase(std::unique(omegas.begin(), omegas.end()), omegas.end());
  std::vector<Sample> samples = solver.evaluate(omegas);

  // High-frequency limit of T: sup of sigma_1(T_a(jw)) on the same grid.
  {
    std::vector<double> ta(omegas.size());
    parallel_for(omegas.size(), [&](std::size_t k) { ta[k] = a_eval.sigma1(omegas[k], tau); });
    const auto it = std::max_element(ta.begin(), ta.end());
    diag.asymptotic_sup = *it;
    if (*it > 0.0) {
      const auto k = static_cast<std::size_t>(it - ta.begin());
      const double lo = omegas[k == 0 ? 0 : k - 1];
      const double hi = omegas[std::min(k + 1, omegas.size() - 1)];
      const auto [w, v] =
          detail::golden_maximize([&](double x) { return a_eval.sigma1(x, tau); }, lo, hi, 1e-12 * std::max(1.0, hi));
      diag.asymptotic_sup = std::max(diag.asymptotic_sup, v);
    }
  }

  for (int pass = 0; pass < opts.max_refinements; ++pass) {
    if (solver.refine_near_top(samples, 0.05) == 0) break;
    ++diag.refinements;
  }
  diag.grid_points = samples.size();

  double sample_max = 0.0;
  for (const auto& s : samples) sample_max = std::max(sample_max, s.value);

  // Level-set iteration seeded just below the strong norm of T_a.
  const double seed = strong_ta * (1.0 - opts.level_margin);
  diag.seed_level_crossed = strong_ta > 0.0 && sample_max > seed;
  double level = std::max(seed, coarse_max);
  if (sample_max <= level) level = std::max(coarse_max, sample_max * (1.0 - tol));

  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    diag.level_history.push_back(level);
    const auto intervals = solver.intervals_above(samples, level);
    if (trace) {
      LevelSetState st;
      st.level = level;
      st.omega_cap = cap;
      st.iteration = it;
      for (const auto& iv : intervals) {
        if (iv.left > 0.0) st.crossings.push_back(iv.left);
        if (iv.right < cap) st.crossings.push_back(iv.right);
      }
      trace->push_back(std::move(st));
    }
    diag.iterations = it + 1;
    if (intervals.empty()) {
      converged = true;
      break;
    }
    std::vector<double> mids;
    for (const auto& iv : intervals) mids.push_back(0.5 * (iv.left + iv.right));
    double next = level;
    for (const auto& s : solver.evaluate(mids)) next = std::max(next, s.value);
    for (const auto& iv : intervals) next = std::max(next, iv.best_value);
    if (next <= level * (1.0 + tol)) {
      level = next;
      converged = true;
      break;
    }
    level = next;
  }
  if (!converged) {
    throw ConvergenceError("level-set iteration did not converge in " + std::to_string(opts.max_iterations) +
                           " iterations");
  }

  // Resolve every peak within tol of the final level; the lowest frequency
  // among those within tol of the maximum is reported.
  struct Peak {
    double omega, value;
  };
  std::vector<Peak> peaks;
  for (const auto& iv : solver.intervals_above(samples, std::max(level, sample_max) * (1.0 - tol))) {
    Peak p{iv.best_omega, iv.best_value};
    if (iv.right > iv.left) {
      const auto [w, v] = detail::golden_maximize([&](double x) { return solver.sigma(x); }, iv.left, iv.right,
                                                  1e-12 * std::max(1.0, iv.right));
      if (v > p.value) p = {w, v};
    }
    peaks.push_back(p);
  }
  double best = level;
  for (const auto& p : peaks) best = std::max(best, p.value);
  r.value = best;
  for (const auto& p : peaks) {
    if (p.value >= best * (1.0 - tol)) {
      r.omega = p.omega;
      break;
    }
  }
  if (!r.omega) {
    // Degenerate flat curve: fall back to the best sample.
    const auto it =
        std::max_element(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.value < b.value; });
    r.omega = it->omega;
  }
  diag.plain_value = best;

  if (diag.asymptotic_sup > best * (1.0 + tol)) {
    // Not attained: T approaches this value at arbitrarily high frequency.
    r.value = diag.asymptotic_sup;
    diag.asymptotic_limit = true;
  }
  return r;
}

}  // namespace

NormResult hinf_norm_T(const DdaeSystem& sys, const BlockDecomposition& dec, DelaySpan tau, const HinfOptions& opts,
                       std::vector<LevelSetState>* trace) {
  const double strong_ta = strong_norm_Ta(dec, opts.torus).value;
  return hinf_impl(sys, dec, tau, opts, strong_ta, trace);
}

NormResult hinf_norm_T(const DdaeSystem& sys, const BlockDecomposition& dec, DelaySpan tau, const HinfOptions& opts) {
  return hinf_norm_T(sys, dec, tau, opts, nullptr);
}

NormResult strong_hinf_norm_T(const DdaeSystem& sys, const BlockDecomposition& dec, DelaySpan tau,
                              const HinfOptions& opts) {
  const NormResult ta = strong_norm_Ta(dec, opts.torus);
  const NormResult plain = hinf_impl(sys, dec, tau, opts, ta.value, nullptr);

  NormResult r = plain.value > ta.value ? plain : ta;
  r.value = std::max(plain.value, ta.value);
  r.rel_tol = opts.rel_tol;
  r.abs_tol = std::max(plain.abs_tol, ta.abs_tol);
  r.tie = std::abs(plain.value - ta.value) <= opts.rel_tol * r.value;
  if (r.tie && r.branch == Branch::PlainT) {
    r.branch = Branch::AsymptoticTa;
    r.omega.reset();
    r.theta = ta.theta;
  }
  r.diagnostics = plain.diagnostics;
  r.diagnostics.grid_per_dim = ta.diagnostics.grid_per_dim;
  r.diagnostics.plain_value = plain.value;
  r.diagnostics.asymptotic_value = ta.value;
  return r;
}

}  // namespace ddae
