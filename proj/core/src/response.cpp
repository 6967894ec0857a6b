#include "ddae/response.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include "json.hpp"

#include "ddae/errors.hpp"
#include "ddae/parallel.hpp"
#include "evaluator.hpp"

namespace ddae {

namespace detail {

namespace {

// Small systems: exact 1-norm reciprocal condition number from the explicit
// inverse, which is cheaper than Eigen's estimator at these sizes.
constexpr Eigen::Index kExactRcondMaxDim = 8;

double norm1(const CMatrix& M) { return M.rows() == 0 ? 0.0 : M.cwiseAbs().colwise().sum().maxCoeff(); }

[[noreturn]] void throw_singular(const char* what, double rcond, std::span<const double> where) {
  std::ostringstream os;
  os << what << " is singular (rcond " << rcond << ") at";
  for (double w : where) os << ' ' << w;
  throw EvaluationError(os.str(), std::vector<double>(where.begin(), where.end()));
}

// Solves M X = rhs, throwing EvaluationError when rcond(M) < kSingularRcond.
// Buffers are per thread so the scan loops do not allocate.
CMatrix solve_checked(const CMatrix& M, const CMatrix& rhs, const char* what, std::span<const double> where) {
  thread_local Eigen::PartialPivLU<CMatrix> lu;
  thread_local CMatrix inv;
  thread_local CMatrix eye;
  const Eigen::Index n = M.rows();
  if (n == 0) return CMatrix(0, rhs.cols());
  lu.compute(M);
  double rcond = 0.0;
  if (n <= kExactRcondMaxDim) {
    if (eye.rows() != n) eye = CMatrix::Identity(n, n);
    inv.noalias() = lu.solve(eye);
    const double a = norm1(M) * norm1(inv);
    rcond = a > 0.0 && std::isfinite(a) ? 1.0 / a : 0.0;
    if (!(rcond >= kSingularRcond)) throw_singular(what, rcond, where);
    return inv * rhs;
  }
  rcond = lu.rcond();
  if (!(rcond >= kSingularRcond)) throw_singular(what, rcond, where);
  return lu.solve(rhs);
}

}  // namespace

TransferEvaluator::TransferEvaluator(const DdaeSystem& sys, DelaySpan tau)
    : E_(sys.E().cast<Complex>()),
      B_(sys.B().cast<Complex>()),
      C_(sys.C().cast<Complex>()),
      tau_(tau.begin(), tau.end()) {
  check_delays(sys, tau);
  for (const Matrix& Ai : sys.A()) A_.push_back(Ai.cast<Complex>());
}

CMatrix TransferEvaluator::evaluate(double omega) const {
  thread_local CMatrix M;
  M.noalias() = Complex(0.0, omega) * E_ - A_[0];
  for (std::size_t i = 0; i < tau_.size(); ++i) M.noalias() -= A_[i + 1] * std::polar(1.0, -omega * tau_[i]);
  return C_ * solve_checked(M, B_, "characteristic matrix", std::span<const double>(&omega, 1));
}

AsymptoticEvaluator::AsymptoticEvaluator(const BlockDecomposition& dec)
    : nu_(dec.nu()), m_(dec.m()), B2_(dec.B2.cast<Complex>()), C2_(dec.C2.cast<Complex>()) {
  for (const Matrix& A : dec.A22) A22_.push_back(A.cast<Complex>());
}

CMatrix AsymptoticEvaluator::torus_matrix(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != m_) {
    throw DimensionError("torus point needs " + std::to_string(m_) + " angles");
  }
  CMatrix M = -A22_[0];
  for (int i = 0; i < m_; ++i) M -= A22_[static_cast<std::size_t>(i) + 1] * std::polar(1.0, -theta[static_cast<std::size_t>(i)]);
  return M;
}

CMatrix AsymptoticEvaluator::torus(std::span<const double> theta) const {
  if (nu_ == 0) {
    if (static_cast<int>(theta.size()) != m_) throw DimensionError("torus point needs " + std::to_string(m_) + " angles");
    return CMatrix::Zero(C2_.rows(), B2_.cols());
  }
  return C2_ * solve_checked(torus_matrix(theta), B2_, "torus matrix", theta);
}

CMatrix AsymptoticEvaluator::frequency(double omega, DelaySpan tau) const {
  if (static_cast<int>(tau.size()) != m_) throw DimensionError("expected " + std::to_string(m_) + " delays");
  std::vector<double> theta(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) theta[i] = omega * tau[i];
  try {
    return torus(theta);
  } catch (const EvaluationError& e) {
    throw EvaluationError(std::string("asymptotic transfer function: ") + e.what(), {omega});
  }
}

double AsymptoticEvaluator::torus_sigma_min(std::span<const double> theta) const {
  if (nu_ == 0) return std::numeric_limits<double>::infinity();
  return sigma_min(torus_matrix(theta));
}

}  // namespace detail

CMatrix eval_T(const DdaeSystem& sys, double omega, DelaySpan tau) {
  return detail::TransferEvaluator(sys, tau).evaluate(omega);
}

CMatrix eval_T(const DdaeSystem& sys, double omega) { return eval_T(sys, omega, sys.delays()); }

CMatrix eval_Ta(const BlockDecomposition& dec, double omega, DelaySpan tau) {
  return detail::AsymptoticEvaluator(dec).frequency(omega, tau);
}

CMatrix eval_Ta_torus(const BlockDecomposition& dec, std::span<const double> theta) {
  return detail::AsymptoticEvaluator(dec).torus(theta);
}

// --- grids -------------------------------------------------------------------

void FrequencyGrid::validate() const {
  if (!std::isfinite(omega_min) || !std::isfinite(omega_max)) throw DimensionError("grid bounds must be finite");
  if (!(omega_min < omega_max)) throw DimensionError("grid needs omega_min < omega_max");
  if (omega_min < 0.0) throw DimensionError("grid covers omega >= 0 only");
  if (count < 2) throw DimensionError("grid needs at least 2 points");
  if (kind == Kind::Logarithmic && !(omega_min > 0.0)) throw DimensionError("logarithmic grid needs omega_min > 0");
}

std::vector<double> FrequencyGrid::points() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(count));
  const double last = count - 1;
  for (int k = 0; k < count; ++k) {
    const double t = k / last;
    if (kind == Kind::Linear) {
      out[static_cast<std::size_t>(k)] = omega_min + (omega_max - omega_min) * t;
    } else {
      out[static_cast<std::size_t>(k)] = omega_min * std::pow(omega_max / omega_min, t);
    }
  }
  out.back() = omega_max;
  return out;
}

std::string FrequencyGrid::describe() const {
  std::ostringstream os;
  os << std::setprecision(17) << (kind == Kind::Linear ? "lin:" : "log:") << omega_min << ':' << omega_max << ':'
     << count;
  return os.str();
}

FrequencyGrid FrequencyGrid::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4) throw DimensionError("grid spec must look like lin:MIN:MAX:COUNT or log:MIN:MAX:COUNT");
  FrequencyGrid g;
  if (parts[0] == "lin") {
    g.kind = Kind::Linear;
  } else if (parts[0] == "log") {
    g.kind = Kind::Logarithmic;
  } else {
    throw DimensionError("grid kind must be 'lin' or 'log', got '" + parts[0] + "'");
  }
  try {
    std::size_t used = 0;
    g.omega_min = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("min");
    g.omega_max = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("max");
    g.count = std::stoi(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument("count");
  } catch (const std::logic_error&) {
    throw DimensionError("malformed grid spec '" + spec + "'");
  }
  g.validate();
  return g;
}

// --- curves ------------------------------------------------------------------

std::optional<std::size_t> SvCurve::argmax() const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!s.ok || s.sigma.empty()) continue;
    if (!best || s.sigma[0] > samples[*best].sigma[0]) best = i;
  }
  return best;
}

namespace {

void write_number(std::ostream& os, double v) {
  // Shortest round-trip representation, same as the JSON writer.
  os << nlohmann::json(v).dump();
}

}  // namespace

std::string SvCurve::to_csv() const {
  std::size_t width = 0;
  for (const auto& s : samples) width = std::max(width, s.sigma.size());
  std::vector<std::string> header;
  if (axis == Axis::Frequency) {
    header.push_back("omega");
  } else {
    const std::size_t dims = samples.empty() ? 0 : samples.front().param.size();
    for (std::size_t d = 0; d < dims; ++d) header.push_back("theta_" + std::to_string(d + 1));
  }
  for (std::size_t k = 0; k < width; ++k) header.push_back("sigma_" + std::to_string(k + 1));
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& s : samples) {
    bool first = true;
    auto sep = [&] {
      if (!first) os << ',';
      first = false;
    };
    for (double p : s.param) {
      sep();
      write_number(os, p);
    }
    for (std::size_t k = 0; k < width; ++k) {
      sep();
      if (s.ok && k < s.sigma.size()) write_number(os, s.sigma[k]);
    }
    os << '\n';
  }
  return os.str();
}

std::string SvCurve::to_json() const {
  nlohmann::ordered_json j;
  j["axis"] = axis == Axis::Frequency ? "frequency" : "torus";
  j["quantity"] = quantity;
  j["system_hash"] = system_hash;
  j["grid"] = grid_spec;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : samples) {
    nlohmann::ordered_json row;
    row["param"] = s.param;
    if (s.ok) {
      row["sigma"] = s.sigma;
    } else {
      row["sigma"] = nullptr;
      row["error"] = s.error;
    }
    arr.push_back(std::move(row));
  }
  j["samples"] = std::move(arr);
  return j.dump(2);
}

std::string system_hash(const DdaeSystem& sys) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  auto feed_matrix = [&](const Matrix& m) {
    const std::int64_t dims[2] = {m.rows(), m.cols()};
    feed(dims, sizeof dims);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c) == 0.0 ? 0.0 : m(r, c);  // fold -0.0
        feed(&v, sizeof v);
      }
    }
  };
  feed_matrix(sys.E());
  for (const Matrix& A : sys.A()) feed_matrix(A);
  feed_matrix(sys.B());
  feed_matrix(sys.C());
  for (double t : sys.delays()) feed(&t, sizeof t);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

SvCurve::Sample sample_from(std::vector<double> param, const std::function<CMatrix()>& eval) {
  SvCurve::Sample s;
  s.param = std::move(param);
  try {
    const Vector sv = singular_values(eval());
    s.sigma.assign(sv.data(), sv.data() + sv.size());
  } catch (const EvaluationError& e) {
    s.ok = false;
    s.error = e.what();
  }
  return s;
}

}  // namespace

SvCurve sweep(const DdaeSystem& sys, const BlockDecomposition& dec, const FrequencyGrid& grid, Quantity which,
              DelaySpan tau) {
  check_delays(sys, tau);
  const std::vector<double> omegas = grid.points();
  SvCurve curve;
  curve.axis = SvCurve::Axis::Frequency;
  curve.quantity = which == Quantity::T ? "T" : "Ta";
  curve.grid_spec = grid.describe();
  curve.system_hash = system_hash(sys);
  curve.samples.resize(omegas.size());

  const detail::TransferEvaluator t_eval(sys, tau);
  const detail::AsymptoticEvaluator a_eval(dec);
  parallel_for(omegas.size(), [&](std::size_t k) {
    const double w = omegas[k];
    curve.samples[k] = sample_from({w}, [&] {
      return which == Quantity::T ? t_eval.evaluate(w) : a_eval.frequency(w, tau);
    });
  });
  return curve;
}

SvCurve sweep(const DdaeSystem& sys, const FrequencyGrid& grid, Quantity which) {
  return sweep(sys, decompose(sys), grid, which, sys.delays());
}

SvCurve sweep_torus(const BlockDecomposition& dec, int grid_per_dim) {
  if (grid_per_dim < 1) throw DimensionError("grid_per_dim must be >= 1");
  const int m = dec.m();
  SvCurve curve;
  curve.axis = SvCurve::Axis::Torus;
  curve.quantity = "Ta";
  curve.grid_spec = "torus:" + std::to_string(grid_per_dim) + "^" + std::to_string(m);

  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(grid_per_dim);
  curve.samples.resize(total);
  const detail::AsymptoticEvaluator a_eval(dec);
  parallel_for(total, [&](std::size_t flat) {
    std::vector<double> theta(static_cast<std::size_t>(m));
    std::size_t rest = flat;
    for (int i = 0; i < m; ++i) {
      theta[static_cast<std::size_t>(i)] = kTwoPi * static_cast<double>(rest % static_cast<std::size_t>(grid_per_dim)) / grid_per_dim;
      rest /= static_cast<std::size_t>(grid_per_dim);
    }
    curve.samples[flat] = sample_from(theta, [&] { return a_eval.torus(theta); });
  });
  return curve;
}

}  // namespace ddae
