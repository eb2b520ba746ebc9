#include "kms_cayley/n_infinity.hpp"

#include "kms_cayley/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kms {

LimitPoint LimitPoint::from_probabilities(std::vector<double> p) {
  LimitPoint out;
  out.support.reserve(p.size());
  for (double x : p) out.support.push_back(x > 0.0);
  out.p = std::move(p);
  return out;
}

double LimitPoint::sum() const {
  double s = 0.0;
  for (double x : p) s += x;
  return s;
}

double sup_distance(const LimitPoint& a, const LimitPoint& b) {
  if (a.p.size() != b.p.size()) throw InputError("limit points of different length");
  double d = 0.0;
  for (std::size_t i = 0; i < a.p.size(); ++i) d = std::max(d, std::abs(a.p[i] - b.p[i]));
  return d;
}

LimitPoint h_center(const Fan& fan, ConeId id, const std::vector<double>& potential, const SolverConfig& cfg) {
  const Cone& cone = fan.cone(id);
  if (cone.dim < 1) throw DomainError("h_center: cone has dimension 0");
  std::vector<double> indicator(potential.size(), 0.0);
  for (auto s : cone.members) indicator[s] = 1.0;
  const double x = power_sum_root(indicator, potential, cfg);
  std::vector<double> t(potential.size(), 0.0);
  for (auto s : cone.members) t[s] = std::pow(x, potential[s]);
  return LimitPoint::from_probabilities(std::move(t));
}

HMap::HMap(Fan fan, std::vector<double> potential, SolverConfig cfg)
    : fan_(std::move(fan)), potential_(std::move(potential)), cfg_(cfg) {
  if (potential_.size() != fan_.generator_count()) throw InputError("HMap: potential/fan size mismatch");
  centers_.resize(fan_.cones().size());
  for (ConeId id = 0; id < fan_.cones().size(); ++id) {
    if (fan_.cone(id).dim >= 1) centers_[id] = h_center(fan_, id, potential_, cfg_);
  }
}

HMap::HMap(const GroupSpec& spec, SolverConfig cfg) : HMap(build_fan(spec, cfg), spec.potentials(), cfg) {}

const LimitPoint& HMap::center_value(ConeId id) const {
  if (fan_.cone(id).dim < 1) throw DomainError("center_value: cone has dimension 0");
  return centers_.at(id);
}

namespace {

/// Cone for a boundary point found by boundary_decompose: the face of `parent`
/// that contains it.
ConeId face_of(const Fan& fan, const Cone& parent, const Vec& p) {
  return fan.closure(argmax_labels(fan, p) | parent.label);
}

}  // namespace

LimitPoint HMap::eval(const Vec& v_in) const {
  if (std::abs(v_in.norm() - 1.0) > cfg_.eps_geom) throw InputError("h_eval: direction must be a unit vector");
  const Vec v = v_in.normalized();
  ConeId id = membership(fan_, v);
  // Walk down: record (λ, cone) pairs until a 1-dim cone or a center.
  struct Step {
    ConeId cone;
    double lambda;
  };
  std::vector<Step> chain;
  Vec cur = v;
  while (true) {
    const Cone& cone = fan_.cone(id);
    if (cone.dim <= 1 || angle_between(cur, cone.center) <= cfg_.eps_geom) break;
    const auto split = boundary_decompose(fan_, id, cur);
    chain.push_back({id, split.lambda});
    const ConeId next = face_of(fan_, cone, split.boundary);
    if (fan_.cone(next).dim >= cone.dim) throw Error("h_eval: boundary point did not reach a lower-dimensional face");
    cur = split.boundary;
    id = next;
  }
  LimitPoint t = center_value(id);
  const auto& w = fan_.scaled();
  // Climb back up through the ratio formula.
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const Cone& cone = fan_.cone(it->cone);
    const std::size_t z = cone.base;
    const double log_lambda = std::log(it->lambda);
    const double log_tz = std::log(t.p[z]) / potential_[z];
    std::vector<double> ratio(potential_.size(), 0.0);
    for (std::size_t s = 0; s < potential_.size(); ++s) {
      if (t.p[s] <= 0.0) continue;
      const double log_ratio =
          std::log(t.p[s]) / potential_[s] - log_tz - log_lambda * cone.center.dot(w[s] - w[z]);
      ratio[s] = std::exp(log_ratio);
    }
    const double x = power_sum_root(ratio, potential_, cfg_);
    std::vector<double> next(potential_.size(), 0.0);
    for (std::size_t s = 0; s < potential_.size(); ++s) {
      if (ratio[s] > 0.0) next[s] = std::pow(x * ratio[s], potential_[s]);
    }
    t = LimitPoint::from_probabilities(std::move(next));
  }
  return t;
}

RayLimitTrace ray_limit_trace(const PartitionData& data, const Vec& direction, const Vec& offset,
                              const RaySchedule& schedule, const SolverConfig& cfg) {
  if (data.rank() == 0) throw UnsupportedError("ray_limit: rank 0");
  if (!(direction.norm() > 0.0)) throw InputError("ray_limit: direction must be nonzero");
  RayLimitTrace trace;
  double r = schedule.r0;
  for (int k = 0; k <= schedule.max_doublings; ++k, r *= 2.0) {
    const Vec u = r * direction + offset;
    const double beta = beta_of_u(data, u, cfg);
    Vec p = data.weights(u, beta);
    p /= p.sum();
    trace.radii.push_back(r);
    trace.iterates.emplace_back(p.data(), p.data() + p.size());
    if (trace.iterates.size() >= 2) {
      const auto& a = trace.iterates[trace.iterates.size() - 2];
      const auto& b = trace.iterates.back();
      double gap = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
      trace.gaps.push_back(gap);
      if (gap < cfg.eps_limit / 10.0) {
        trace.converged = true;
        break;
      }
    }
  }
  trace.point = LimitPoint::from_probabilities(trace.iterates.back());
  return trace;
}

namespace {

LimitPoint finish(const RayLimitTrace& trace) {
  if (trace.converged) return trace.point;
  std::ostringstream msg;
  msg.precision(17);
  msg << "ray_limit: no convergence by r = " << trace.radii.back() << "; last iterates (";
  const auto& prev = trace.iterates.size() >= 2 ? trace.iterates[trace.iterates.size() - 2] : trace.iterates.back();
  for (std::size_t i = 0; i < prev.size(); ++i) msg << (i ? "," : "") << prev[i];
  msg << ") and (";
  for (std::size_t i = 0; i < trace.iterates.back().size(); ++i) msg << (i ? "," : "") << trace.iterates.back()[i];
  msg << "), gap " << (trace.gaps.empty() ? 0.0 : trace.gaps.back());
  throw ConvergenceError(msg.str());
}

}  // namespace

LimitPoint ray_limit(const PartitionData& data, const Vec& v, const RaySchedule& schedule, const SolverConfig& cfg) {
  return finish(ray_limit_trace(data, v, Vec::Zero(v.size()), schedule, cfg));
}

AssociatedRay associated_ray(const Fan& fan, const Vec& v_in) {
  AssociatedRay out;
  Vec cur = v_in.normalized();
  out.offset = Vec::Zero(cur.size());
  ConeId id = membership(fan, cur);
  while (true) {
    const Cone& cone = fan.cone(id);
    if (cone.dim <= 1) {
      out.direction = cone.rays.front();
      break;
    }
    if (angle_between(cur, cone.center) <= fan.eps_geom()) {
      out.direction = cone.center;
      break;
    }
    const auto split = boundary_decompose(fan, id, cur);
    out.offset -= std::log(split.lambda) * cone.center;
    ++out.depth;
    cur = split.boundary;
    id = face_of(fan, cone, cur);
  }
  return out;
}

LimitPoint associated_limit(const Fan& fan, const PartitionData& data, const Vec& v, const RaySchedule& schedule,
                            const SolverConfig& cfg) {
  const auto ray = associated_ray(fan, v);
  return finish(ray_limit_trace(data, ray.direction, ray.offset, schedule, cfg));
}

double kms_infinity_eval(const GroupSpec& spec, const std::vector<std::pair<double, LimitPoint>>& points,
                         const Word& t, const Word& u) {
  double total = 0.0;
  for (const auto& [w, p] : points) {
    if (!(w >= 0.0)) throw InputError("weights must be non-negative");
    if (p.p.size() != spec.size()) throw InputError("limit point has the wrong length");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("weights must sum to 1");
  if (!spec.same_endpoint(t, u)) throw DomainError("V_t V_u* is not in the algebra: the words have different endpoints");
  if (!(t == u)) return 0.0;
  double value = 0.0;
  for (const auto& [w, p] : points) {
    double prod = w;
    for (auto s : t.letters) prod *= p.p[s];
    value += prod;
  }
  return value;
}

std::vector<std::pair<Vec, LimitPoint>> n_infinity_sample(const HMap& h, std::size_t K) {
  std::vector<std::pair<Vec, LimitPoint>> out;
  for (const auto& v : sphere_grid(h.fan().rank(), K)) out.emplace_back(v, h.eval(v));
  return out;
}

}  // namespace kms
