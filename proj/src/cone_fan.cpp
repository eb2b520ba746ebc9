#include "kms_cayley/cone_fan.hpp"

#include "kms_cayley/error.hpp"
#include "kms_cayley/polyhedral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace kms {

Fan::Fan(std::vector<Vec> scaled, std::size_t rank, double eps_geom)
    : scaled_(std::move(scaled)), rank_(rank), eps_geom_(eps_geom), scale_(1.0) {
  for (const auto& w : scaled_) scale_ = std::max(scale_, w.norm());
}

std::optional<ConeId> Fan::find(LabelMask label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

std::vector<ConeId> Fan::skeleton(int k) const {
  std::vector<ConeId> out;
  for (ConeId id = 0; id < cones_.size(); ++id) {
    if (cones_[id].dim >= 1 && cones_[id].dim <= k) out.push_back(id);
  }
  return out;
}

ConeId Fan::add(Cone cone) {
  const ConeId id = cones_.size();
  by_label_.emplace(cone.label, id);
  cones_.push_back(std::move(cone));
  return id;
}

void Fan::link_faces() {
  for (auto& a : cones_) {
    a.faces.clear();
    for (ConeId id = 0; id < cones_.size(); ++id) {
      const auto& b = cones_[id];
      if (b.label != a.label && a.contains(b.label)) a.faces.push_back(id);
    }
  }
}

ConeId Fan::closure(LabelMask labels) const {
  const LabelMask all = generator_count() >= 32 ? ~LabelMask{0} : ((LabelMask{1} << generator_count()) - 1);
  LabelMask hull = all;
  bool any = false;
  for (const auto& c : cones_) {
    if (c.dim == 1 && (c.label & labels) == labels) {
      hull &= c.label;
      any = true;
    }
  }
  if (!any) hull = all;
  auto id = find(hull);
  if (!id) throw Error("fan has no cone for the closure of a label set");
  return *id;
}

namespace {

LabelMask argmax_mask(const std::vector<Vec>& scaled, const Vec& v, double tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& w : scaled) best = std::max(best, w.dot(v));
  LabelMask mask = 0;
  for (std::size_t s = 0; s < scaled.size(); ++s) {
    if (best - scaled[s].dot(v) <= tol) mask |= LabelMask{1} << s;
  }
  return mask;
}

Cone make_cone(const std::vector<Vec>& scaled, LabelMask label, std::vector<Vec> rays, double eps) {
  Cone c;
  c.label = label;
  for (std::size_t s = 0; s < scaled.size(); ++s) {
    if (label & (LabelMask{1} << s)) c.members.push_back(s);
  }
  c.base = c.members.front();
  const Vec& wb = scaled[c.base];
  for (std::size_t s = 0; s < scaled.size(); ++s) {
    if (s == c.base) continue;
    if (label & (LabelMask{1} << s)) {
      c.eq_normals.push_back(scaled[s] - wb);
    } else {
      c.ineq_normals.push_back(scaled[s] - wb);
      c.ineq_generators.push_back(s);
    }
  }
  const auto n = static_cast<Eigen::Index>(wb.size());
  c.dim = matrix_rank(rays, n, eps);
  if (!rays.empty()) {
    Vec sum = Vec::Zero(n);
    for (const auto& r : rays) sum += r;
    c.center = (sum / static_cast<double>(rays.size())).normalized();
  }
  c.rays = std::move(rays);
  return c;
}

}  // namespace

LabelMask argmax_labels(const Fan& fan, const Vec& v) {
  return argmax_mask(fan.scaled(), v, fan.eps_geom() * fan.scale());
}

Fan build_fan(const GroupSpec& spec, const SolverConfig& cfg) {
  return build_fan(spec.potentials(), spec.cvecs(), cfg);
}

Fan build_fan(const std::vector<double>& potential, const std::vector<Vec>& cvec, const SolverConfig& cfg) {
  const std::size_t m = cvec.size();
  if (m == 0 || potential.size() != m) throw InputError("build_fan: bad generator data");
  if (m > kMaxFanGenerators) throw InputError("build_fan: at most 16 generators supported");
  const auto n = static_cast<std::size_t>(cvec.front().size());
  if (n == 0) throw UnsupportedError("build_fan: rank 0 has no fan");
  std::vector<Vec> scaled;
  for (std::size_t s = 0; s < m; ++s) {
    if (!(potential[s] > 0)) throw InputError("build_fan: F must be positive");
    scaled.push_back(cvec[s] / potential[s]);
  }
  Fan fan(scaled, n, cfg.eps_geom);
  const double tol = cfg.eps_geom * fan.scale();
  const LabelMask all = (LabelMask{1} << m) - 1;

  // 1-dim cones: subsets whose equality system has a 1-dim kernel with a
  // feasible sign.
  std::map<LabelMask, Vec> rays;
  for (LabelMask z = 1; z <= all; ++z) {
    const auto base = static_cast<std::size_t>(std::countr_zero(z));
    std::vector<Vec> eq;
    for (std::size_t s = base + 1; s < m; ++s) {
      if (z & (LabelMask{1} << s)) eq.push_back(scaled[s] - scaled[base]);
    }
    if (static_cast<std::size_t>(matrix_rank(eq, static_cast<Eigen::Index>(n), cfg.eps_geom)) != n - 1) continue;
    Eigen::MatrixXd ker = null_space(eq, static_cast<Eigen::Index>(n), cfg.eps_geom);
    if (ker.cols() != 1) continue;
    for (double sign : {1.0, -1.0}) {
      Vec d = (sign * ker.col(0)).normalized();
      bool ok = true;
      for (std::size_t s = 0; s < m && ok; ++s) {
        if ((z & (LabelMask{1} << s)) == 0 && (scaled[s] - scaled[base]).dot(d) > tol) ok = false;
      }
      if (!ok) continue;
      const LabelMask label = argmax_mask(scaled, d, tol);
      rays.emplace(label, d);
      break;
    }
  }

  // Every other cone is generated by the rays whose label contains Z.
  std::map<LabelMask, std::vector<Vec>> cones;
  for (LabelMask z = 1; z <= all; ++z) {
    LabelMask hull = all;
    std::vector<Vec> gens;
    for (const auto& [label, d] : rays) {
      if ((label & z) == z) {
        hull &= label;
        gens.push_back(d);
      }
    }
    if (gens.empty()) hull = all;
    cones.try_emplace(hull, std::move(gens));
  }
  // Order: by dimension, then label, so ids are deterministic.
  std::vector<Cone> built;
  for (auto& [label, gens] : cones) built.push_back(make_cone(scaled, label, std::move(gens), cfg.eps_geom));
  std::stable_sort(built.begin(), built.end(), [](const Cone& a, const Cone& b) { return a.dim < b.dim; });
  for (auto& c : built) {
    // Strong convexity: −r must violate a constraint for every ray r.
    for (const auto& r : c.rays) {
      const Vec neg = -r;
      bool inside = true;
      for (const auto& q : c.ineq_normals) inside = inside && q.dot(neg) <= tol;
      for (const auto& e : c.eq_normals) inside = inside && std::abs(e.dot(neg)) <= tol;
      if (inside) throw InputError("build_fan: a cone is not strongly convex (positive spanning fails)");
    }
    fan.add(std::move(c));
  }
  fan.link_faces();
  return fan;
}

ConeId membership(const Fan& fan, const Vec& v) {
  if (std::abs(v.norm() - 1.0) > fan.eps_geom()) throw InputError("membership: direction must be a unit vector");
  return fan.closure(argmax_labels(fan, v));
}

ConeSlack cone_slack(const Cone& cone, const Vec& v) {
  ConeSlack out{-std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& q : cone.ineq_normals) out.inequality = std::max(out.inequality, q.dot(v));
  for (const auto& e : cone.eq_normals) out.equality = std::max(out.equality, std::abs(e.dot(v)));
  return out;
}

double angle_between(const Vec& a, const Vec& b) { return 2.0 * std::atan2((a - b).norm(), (a + b).norm()); }

BoundarySplit boundary_decompose(const Fan& fan, ConeId id, const Vec& v) {
  const Cone& cone = fan.cone(id);
  if (cone.dim < 2) throw DomainError("boundary_decompose: cone has dimension < 2");
  const double tol = fan.eps_geom() * fan.scale();
  const auto slack = cone_slack(cone, v);
  if (slack.inequality > tol || slack.equality > tol) throw DomainError("boundary_decompose: v is outside the cone");
  const Vec& c = cone.center;
  Vec w = v - v.dot(c) * c;
  if (w.norm() <= fan.eps_geom()) throw DomainError("boundary_decompose: v is the center");
  w.normalize();
  const double theta_v = std::atan2(v.dot(w), v.dot(c));
  // Along cos(θ)c + sin(θ)w each inequality q changes sign exactly once in
  // (0, π), at atan2(−q·c, q·w).
  double theta_exit = std::numbers::pi;
  for (const auto& q : cone.ineq_normals) {
    const double a = q.dot(c);
    const double b = q.dot(w);
    if (!(a < 0.0)) continue;
    theta_exit = std::min(theta_exit, std::atan2(-a, b));
  }
  if (theta_v > theta_exit + fan.eps_geom()) throw DomainError("boundary_decompose: v is outside the cone");
  const double theta = std::max(theta_exit, theta_v);
  BoundarySplit out;
  out.boundary = (std::cos(theta) * c + std::sin(theta) * w).normalized();
  out.lambda = std::sin(theta_v) / (std::sin(theta_v) + std::sin(theta - theta_v));
  return out;
}

}  // namespace kms
