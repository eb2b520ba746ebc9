#pragma once

#include "kms_cayley/group.hpp"

#include <span>
#include <vector>

namespace kms {

/// Tolerances shared by every solver. The ordering
/// eps_root < eps_grad < eps_geom < eps_limit must hold.
struct SolverConfig {
  double eps_root = 1e-12;
  double eps_grad = 1e-10;
  double eps_geom = 1e-9;
  double eps_limit = 1e-6;
  int max_iter = 200;

  /// Throws InputError unless every field is positive.
  void validate() const;

  /// Applies KMS_CAYLEY_EPS_ROOT, _GRAD, _GEOM and _LIMIT when set.
  static SolverConfig from_env();
  static SolverConfig from_env(SolverConfig base);
};

/// The exponents (F(s), c_s) of the partition function
/// (u, β) ↦ Σ_s exp(u·c_s − βF(s)).
class PartitionData {
 public:
  explicit PartitionData(const GroupSpec& spec);
  PartitionData(std::vector<double> potential, std::vector<Vec> cvec);

  std::size_t size() const { return potential_.size(); }
  std::size_t rank() const { return static_cast<std::size_t>(c_.cols()); }
  const std::vector<double>& potentials() const { return potential_; }
  /// Row s holds c_s.
  const Eigen::MatrixXd& cmatrix() const { return c_; }

  /// Exponents u·c_s − βF(s).
  Vec exponents(const Vec& u, double beta) const;
  /// log Σ_s exp(u·c_s − βF(s)), evaluated stably.
  double log_partition(const Vec& u, double beta) const;
  /// p_s = exp(u·c_s − βF(s)), the (unnormalized) Bernoulli weights.
  Vec weights(const Vec& u, double beta) const;
  /// Gradient in u of Σ_s exp(u·c_s − βF(s)).
  Vec gradient(const Vec& u, double beta) const;

 private:
  std::vector<double> potential_;
  Eigen::MatrixXd c_;
};

double logsumexp(const Vec& x);

/// Unique β(u) > 0 with Σ_s exp(−βF(s) + u·c_s) = 1.
double beta_of_u(const PartitionData& data, const Vec& u, const SolverConfig& cfg = {});

/// Minimizer u(β) of the strictly convex map u ↦ Σ_s exp(u·c_s − βF(s)).
/// Requires rank >= 1.
Vec u_of_beta(const PartitionData& data, double beta, const SolverConfig& cfg = {});

/// min_u Σ_s exp(u·c_s − βF(s)) (or Σ_s exp(−βF(s)) when the rank is 0).
double min_partition(const PartitionData& data, double beta, const SolverConfig& cfg = {});

/// Critical inverse temperature β₀: the root of min_partition(β) = 1.
double critical_beta(const PartitionData& data, const SolverConfig& cfg = {});

/// Positive t with u(β) + t·v ∈ Q(β). Throws DomainError when β <= β₀.
double radial_root(const PartitionData& data, double beta, const Vec& v, const SolverConfig& cfg = {});
/// Same with u(β) already known.
double radial_root(const PartitionData& data, double beta, const Vec& u_beta, const Vec& v,
                   const SolverConfig& cfg);

/// Positive x with Σ_s (x·r_s)^{F(s)} = 1 (terms with r_s = 0 vanish).
double power_sum_root(std::span<const double> weights, std::span<const double> exponents,
                      const SolverConfig& cfg = {});

/// Deterministic unit vectors: n = 1 gives {+1, −1}, n = 2 gives K equal
/// angles starting at (1, 0), n = 3 a Fibonacci sphere, n >= 4 normalized
/// Gaussian vectors from a fixed-seed generator.
std::vector<Vec> sphere_grid(std::size_t n, std::size_t K);

/// Quasi-random unit vectors (golden-ratio angle sequence for n = 2, the
/// same generators as sphere_grid otherwise); never hits grid points.
std::vector<Vec> quasi_random_directions(std::size_t n, std::size_t K);

}  // namespace kms
