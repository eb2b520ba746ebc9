#pragma once

#include "kms_cayley/cone_fan.hpp"
#include "kms_cayley/group.hpp"
#include "kms_cayley/numerics.hpp"

#include <utility>
#include <vector>

namespace kms {

/// A point of the simplex Δ_Y.
struct LimitPoint {
  std::vector<double> p;
  std::vector<bool> support;  // p_s > 0

  static LimitPoint from_probabilities(std::vector<double> p);
  double sum() const;
};

double sup_distance(const LimitPoint& a, const LimitPoint& b);

/// The homeomorphism H : S^{n−1} → N∞, evaluated through the recursive
/// skeleton construction. Center values H(c(M(Z))) are computed once at
/// construction and shared read-only afterwards.
class HMap {
 public:
  HMap(Fan fan, std::vector<double> potential, SolverConfig cfg = {});
  HMap(const GroupSpec& spec, SolverConfig cfg = {});

  const Fan& fan() const { return fan_; }
  const std::vector<double>& potentials() const { return potential_; }
  const SolverConfig& config() const { return cfg_; }

  /// Cached H(c(M(Z))); requires dim >= 1.
  const LimitPoint& center_value(ConeId id) const;

  /// H(v) for a unit vector v.
  LimitPoint eval(const Vec& v) const;

 private:
  Fan fan_;
  std::vector<double> potential_;
  SolverConfig cfg_;
  std::vector<LimitPoint> centers_;  // indexed by ConeId; empty p for dim 0
};

/// The unique t with support Z and t_s^{1/F(s)} constant on Z.
LimitPoint h_center(const Fan& fan, ConeId id, const std::vector<double>& potential, const SolverConfig& cfg = {});

struct RaySchedule {
  double r0 = 1.0;
  int max_doublings = 12;
};

struct RayLimitTrace {
  std::vector<double> radii;
  std::vector<std::vector<double>> iterates;
  std::vector<double> gaps;  // sup-norm gap between consecutive iterates
  bool converged = false;
  LimitPoint point;
};

/// p_s(r) = exp(−β(rv)F(s) + r·v·c_s) along r = r0·2^k (plus a fixed offset
/// when given), stopping once consecutive iterates differ by < eps_limit/10.
RayLimitTrace ray_limit_trace(const PartitionData& data, const Vec& direction, const Vec& offset,
                              const RaySchedule& schedule, const SolverConfig& cfg = {});

/// lim_{r→∞} p(r v). Throws ConvergenceError (reporting the last two iterates
/// and their gap) when the schedule is exhausted.
LimitPoint ray_limit(const PartitionData& data, const Vec& v, const RaySchedule& schedule = {},
                     const SolverConfig& cfg = {});

/// Direction d and offset o such that r·d + o is associated with H(v):
/// the boundary_decompose chain from v down to a 1-dim cone (or a center),
/// with o = −Σ log(λ_k)·c(M(Z_k)).
struct AssociatedRay {
  Vec direction;
  Vec offset;
  int depth = 0;
};
AssociatedRay associated_ray(const Fan& fan, const Vec& v);

/// lim_{r→∞} p(r·d + o) for the associated ray of v: an oracle for H(v)
/// that does not use the ratio formula or power sums.
LimitPoint associated_limit(const Fan& fan, const PartitionData& data, const Vec& v,
                            const RaySchedule& schedule = {}, const SolverConfig& cfg = {});

/// Σ_atoms weight · Π_i p(t_i) when t = u, 0 when t ≠ u; DomainError when the
/// endpoints differ.
double kms_infinity_eval(const GroupSpec& spec, const std::vector<std::pair<double, LimitPoint>>& points,
                         const Word& t, const Word& u);

/// H on sphere_grid(n, K).
std::vector<std::pair<Vec, LimitPoint>> n_infinity_sample(const HMap& h, std::size_t K);

}  // namespace kms
