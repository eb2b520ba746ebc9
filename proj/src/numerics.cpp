#include "kms_cayley/numerics.hpp"

#include "kms_cayley/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace kms {

void SolverConfig::validate() const {
  if (!(eps_root > 0 && eps_grad > 0 && eps_geom > 0 && eps_limit > 0 && max_iter > 0)) {
    throw InputError("solver tolerances and max_iter must be positive");
  }
}

SolverConfig SolverConfig::from_env() { return from_env(SolverConfig{}); }

SolverConfig SolverConfig::from_env(SolverConfig base) {
  auto read = [](const char* name, double& field) {
    if (const char* value = std::getenv(name)) {
      char* end = nullptr;
      const double x = std::strtod(value, &end);
      if (end == value || *end != '\0') throw InputError(std::string("bad value for ") + name);
      field = x;
    }
  };
  read("KMS_CAYLEY_EPS_ROOT", base.eps_root);
  read("KMS_CAYLEY_EPS_GRAD", base.eps_grad);
  read("KMS_CAYLEY_EPS_GEOM", base.eps_geom);
  read("KMS_CAYLEY_EPS_LIMIT", base.eps_limit);
  base.validate();
  return base;
}

// ---------------------------------------------------------------------------

PartitionData::PartitionData(const GroupSpec& spec) : PartitionData(spec.potentials(), spec.cvecs()) {}

PartitionData::PartitionData(std::vector<double> potential, std::vector<Vec> cvec)
    : potential_(std::move(potential)) {
  if (potential_.size() != cvec.size()) throw InputError("potential and c-vectors differ in length");
  const Eigen::Index n = cvec.empty() ? 0 : cvec.front().size();
  c_.resize(static_cast<Eigen::Index>(cvec.size()), n);
  for (std::size_t s = 0; s < cvec.size(); ++s) {
    if (cvec[s].size() != n) throw InputError("c-vectors have inconsistent lengths");
    c_.row(static_cast<Eigen::Index>(s)) = cvec[s].transpose();
  }
}

Vec PartitionData::exponents(const Vec& u, double beta) const {
  Vec x(static_cast<Eigen::Index>(size()));
  for (Eigen::Index s = 0; s < x.size(); ++s) {
    x[s] = (c_.cols() > 0 ? c_.row(s).dot(u) : 0.0) - beta * potential_[static_cast<std::size_t>(s)];
  }
  return x;
}

double logsumexp(const Vec& x) {
  if (x.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((x.array() - m).exp().sum());
}

double PartitionData::log_partition(const Vec& u, double beta) const { return logsumexp(exponents(u, beta)); }

Vec PartitionData::weights(const Vec& u, double beta) const { return exponents(u, beta).array().exp().matrix(); }

Vec PartitionData::gradient(const Vec& u, double beta) const { return c_.transpose() * weights(u, beta); }

namespace {

Vec softmax(const Vec& x) {
  const double m = x.maxCoeff();
  Vec e = (x.array() - m).exp().matrix();
  return e / e.sum();
}

/// Root of a monotone function on a bracket [lo, hi] where value(lo) and
/// value(hi) have opposite signs. Newton steps are taken when they stay in
/// the bracket, bisection otherwise.
template <class Fn>
double bracketed_newton(Fn&& fn, double lo, double hi, double tol, int max_iter, const char* what) {
  double flo = fn(lo).first;
  const bool increasing = flo < 0;
  double x = 0.5 * (lo + hi);
  double best_x = x;
  double best_f = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    auto [f, df] = fn(x);
    if (std::abs(f) < best_f) {
      best_f = std::abs(f);
      best_x = x;
    }
    if (std::abs(f) <= 0.1 * tol) return x;
    if ((f < 0) == increasing) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    double next = (df != 0.0 && std::isfinite(df)) ? x - f / df : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  if (best_f <= tol) return best_x;
  throw ConvergenceError(std::string(what) + ": no convergence (residual " + std::to_string(best_f) + ")");
}

}  // namespace

double beta_of_u(const PartitionData& data, const Vec& u, const SolverConfig& cfg) {
  const Vec cu = data.rank() > 0 ? Vec(data.cmatrix() * u) : Vec::Zero(static_cast<Eigen::Index>(data.size()));
  Eigen::Map<const Vec> F(data.potentials().data(), static_cast<Eigen::Index>(data.size()));
  auto fn = [&](double beta) {
    Vec x = cu - beta * F;
    return std::pair{logsumexp(x), -softmax(x).dot(F)};
  };
  if (!(fn(0.0).first > 0.0)) throw InputError("beta_of_u: Σ exp(u·c_s) <= 1, data violates positive spanning");
  double hi = 1.0;
  int guard = 0;
  while (fn(hi).first > 0.0) {
    hi *= 2.0;
    if (++guard > 1100) throw ConvergenceError("beta_of_u: cannot bracket the root");
  }
  return bracketed_newton(fn, 0.0, hi, cfg.eps_root, cfg.max_iter, "beta_of_u");
}

namespace {

Vec minimize_partition(const PartitionData& data, double beta, Vec u, const SolverConfig& cfg) {
  const auto& C = data.cmatrix();
  const double cscale = std::max(1.0, C.rowwise().norm().maxCoeff());
  auto objective = [&](const Vec& x) { return logsumexp(C * x - beta * Eigen::Map<const Vec>(data.potentials().data(), C.rows())); };
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Vec x = data.exponents(u, beta);
    const Vec p = softmax(x);
    const Vec g = C.transpose() * p;
    if (g.norm() <= 16 * std::numeric_limits<double>::epsilon() * cscale) break;
    Eigen::MatrixXd H = C.transpose() * p.asDiagonal() * C - g * g.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Vec d = -ldlt.solve(g);
    if (ldlt.info() != Eigen::Success || !d.allFinite() || g.dot(d) >= 0) d = -g;
    const double f0 = logsumexp(x);
    const double g0 = g.norm();
    // Near the minimum the objective decrease drops below rounding; fall back on the gradient norm.
    auto accept = [&](const Vec& y, double step) {
      if (objective(y) <= f0 + 1e-4 * step * g.dot(d)) return true;
      return (C.transpose() * softmax(data.exponents(y, beta))).norm() < 0.5 * g0;
    };
    double step = 1.0;
    Vec candidate = u + d;
    while (!accept(candidate, step) && step > 1e-20) {
      step *= 0.5;
      candidate = u + step * d;
    }
    const double moved = (candidate - u).norm();
    u = candidate;
    if (moved <= std::numeric_limits<double>::epsilon() * (1.0 + u.norm())) break;
  }
  const double grad = data.gradient(u, beta).norm();
  if (!(grad <= cfg.eps_grad)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "u_of_beta: gradient norm %.3g above eps_grad %.3g (partition sum %.3g)", grad,
                  cfg.eps_grad, data.weights(u, beta).sum());
    throw ConvergenceError(buf);
  }
  return u;
}

}  // namespace

Vec u_of_beta(const PartitionData& data, double beta, const SolverConfig& cfg) {
  if (data.rank() == 0) throw UnsupportedError("u_of_beta: rank 0 has no free direction");
  return minimize_partition(data, beta, Vec::Zero(static_cast<Eigen::Index>(data.rank())), cfg);
}

double min_partition(const PartitionData& data, double beta, const SolverConfig& cfg) {
  if (data.rank() == 0) return std::exp(data.log_partition(Vec(0), beta));
  return std::exp(data.log_partition(u_of_beta(data, beta, cfg), beta));
}

double critical_beta(const PartitionData& data, const SolverConfig& cfg) {
  Eigen::Map<const Vec> F(data.potentials().data(), static_cast<Eigen::Index>(data.size()));
  Vec warm = Vec::Zero(static_cast<Eigen::Index>(data.rank()));
  // log h(β) with derivative −Σ F(s) p̂_s (envelope theorem at u(β)).
  auto fn = [&](double beta) {
    if (data.rank() > 0) warm = minimize_partition(data, beta, warm, cfg);
    Vec x = data.exponents(warm, beta);
    return std::pair{logsumexp(x), -softmax(x).dot(F)};
  };
  double lo = 0.0;
  double hi = 1.0;
  double step = 1.0;
  int guard = 0;
  while (fn(lo).first <= 0.0) {
    hi = lo;
    lo -= step;
    step *= 2;
    if (++guard > 1100) throw ConvergenceError("critical_beta: cannot bracket from below");
  }
  while (fn(hi).first > 0.0) {
    lo = hi;
    hi += step;
    step *= 2;
    if (++guard > 1100) throw ConvergenceError("critical_beta: cannot bracket from above");
  }
  return bracketed_newton(fn, lo, hi, cfg.eps_root, cfg.max_iter, "critical_beta");
}

double radial_root(const PartitionData& data, double beta, const Vec& v, const SolverConfig& cfg) {
  return radial_root(data, beta, u_of_beta(data, beta, cfg), v, cfg);
}

double radial_root(const PartitionData& data, double beta, const Vec& u_beta, const Vec& v,
                   const SolverConfig& cfg) {
  if (data.rank() == 0) throw UnsupportedError("radial_root: rank 0");
  if (std::abs(v.norm() - 1.0) > cfg.eps_geom) throw InputError("radial_root: direction must be a unit vector");
  const double h = std::exp(data.log_partition(u_beta, beta));
  if (!(h < 1.0 - cfg.eps_root)) {
    throw DomainError("no sphere: beta = " + std::to_string(beta) + " is not above the critical value");
  }
  const Vec cu = data.cmatrix() * u_beta;
  const Vec cv = data.cmatrix() * v;
  Eigen::Map<const Vec> F(data.potentials().data(), static_cast<Eigen::Index>(data.size()));
  auto fn = [&](double t) {
    Vec x = cu + t * cv - beta * F;
    return std::pair{logsumexp(x), softmax(x).dot(cv)};
  };
  double hi = 1.0;
  int guard = 0;
  while (fn(hi).first < 0.0) {
    hi *= 2.0;
    if (++guard > 1100) throw ConvergenceError("radial_root: cannot bracket the root");
  }
  return bracketed_newton(fn, 0.0, hi, cfg.eps_root, cfg.max_iter, "radial_root");
}

double power_sum_root(std::span<const double> weights, std::span<const double> exponents,
                      const SolverConfig& cfg) {
  if (weights.size() != exponents.size()) throw InputError("power_sum_root: size mismatch");
  std::vector<double> logr;
  std::vector<double> F;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0 || !std::isfinite(weights[i])) throw InputError("power_sum_root: weights must be finite and >= 0");
    if (weights[i] > 0) {
      logr.push_back(std::log(weights[i]));
      F.push_back(exponents[i]);
    }
  }
  if (logr.empty()) throw InputError("power_sum_root: all weights are zero");
  const auto k = static_cast<Eigen::Index>(logr.size());
  Eigen::Map<const Vec> LR(logr.data(), k);
  Eigen::Map<const Vec> FF(F.data(), k);
  // In y = log x the equation is logsumexp_s F(s)(y + log r_s) = 0.
  auto fn = [&](double y) {
    Vec x = (FF.array() * (LR.array() + y)).matrix();
    return std::pair{logsumexp(x), softmax(x).dot(FF)};
  };
  double lo = -1.0;
  double hi = 1.0;
  int guard = 0;
  while (fn(lo).first > 0.0) {
    lo *= 2.0;
    if (++guard > 1100) throw ConvergenceError("power_sum_root: cannot bracket");
  }
  while (fn(hi).first < 0.0) {
    hi *= 2.0;
    if (++guard > 1100) throw ConvergenceError("power_sum_root: cannot bracket");
  }
  return std::exp(bracketed_newton(fn, lo, hi, cfg.eps_root, cfg.max_iter, "power_sum_root"));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Vec> gaussian_directions(std::size_t n, std::size_t K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vec> out;
  while (out.size() < K) {
    Vec v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    if (v.norm() > 1e-6) out.push_back(v.normalized());
  }
  return out;
}

std::vector<Vec> fibonacci_sphere(std::size_t K, double offset) {
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec> out;
  for (std::size_t i = 0; i < K; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(K);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = static_cast<double>(i) * golden_angle + offset;
    Vec v(3);
    v << r * std::cos(phi), r * std::sin(phi), z;
    out.push_back(v.normalized());
  }
  return out;
}

}  // namespace

std::vector<Vec> sphere_grid(std::size_t n, std::size_t K) {
  std::vector<Vec> out;
  if (n == 0) return out;
  if (n == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
    return out;
  }
  if (n == 2) {
    for (std::size_t k = 0; k < K; ++k) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(K);
      Vec v(2);
      v << std::cos(theta), std::sin(theta);
      out.push_back(v);
    }
    return out;
  }
  if (n == 3) return fibonacci_sphere(K, 0.0);
  return gaussian_directions(n, K, 0x5eed0001);
}

std::vector<Vec> quasi_random_directions(std::size_t n, std::size_t K) {
  std::vector<Vec> out;
  if (n == 0) return out;
  if (n == 1) {
    for (std::size_t k = 0; k < K; ++k) out.push_back(Vec::Constant(1, k % 2 == 0 ? 1.0 : -1.0));
    return out;
  }
  if (n == 2) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t k = 0; k < K; ++k) {
      double frac = 0.1234567 + static_cast<double>(k) * inv_phi;
      frac -= std::floor(frac);
      const double theta = 2.0 * std::numbers::pi * frac;
      Vec v(2);
      v << std::cos(theta), std::sin(theta);
      out.push_back(v);
    }
    return out;
  }
  if (n == 3) return fibonacci_sphere(K, 0.3141);
  return gaussian_directions(n, K, 0x5eed0002);
}

}  // namespace kms
