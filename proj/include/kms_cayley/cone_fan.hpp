#pragma once

#include "kms_cayley/group.hpp"
#include "kms_cayley/numerics.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace kms {

using ConeId = std::size_t;
/// Bit s set <=> generator s belongs to the label set.
using LabelMask = std::uint32_t;

inline constexpr std::size_t kMaxFanGenerators = 16;

/// The polyhedral cone
///   M(Z) = {v : v·(w_s − w_z) <= 0 for s ∉ Z, v·(w_z' − w_z) = 0 for z, z' ∈ Z},
/// w_s = c_s / F(s), stored with its maximal label set Z.
struct Cone {
  LabelMask label = 0;
  std::vector<std::size_t> members;  // Z in generator order
  std::size_t base = 0;              // first element of Z
  std::vector<Vec> eq_normals;       // w_z' − w_base, z' ∈ Z \ {base}
  std::vector<Vec> ineq_normals;     // w_s − w_base, s ∉ Z
  std::vector<std::size_t> ineq_generators;
  int dim = 0;
  std::vector<Vec> rays;  // unit generators of the 1-faces
  Vec center;             // normalized mean of the rays (empty when dim = 0)
  std::vector<ConeId> faces;  // proper faces, by id

  bool contains(LabelMask other) const { return (label & other) == label; }
};

class Fan {
 public:
  Fan(std::vector<Vec> scaled, std::size_t rank, double eps_geom);

  std::size_t rank() const { return rank_; }
  std::size_t generator_count() const { return scaled_.size(); }
  double eps_geom() const { return eps_geom_; }
  /// w_s = c_s / F(s).
  const std::vector<Vec>& scaled() const { return scaled_; }

  const std::vector<Cone>& cones() const { return cones_; }
  const Cone& cone(ConeId id) const { return cones_.at(id); }
  std::optional<ConeId> find(LabelMask label) const;
  /// Cones of dimension 1..k.
  std::vector<ConeId> skeleton(int k) const;

  /// The smallest fan cone whose label contains `labels`.
  ConeId closure(LabelMask labels) const;

  /// Scale used for tie tolerances: max(1, max_s |w_s|).
  double scale() const { return scale_; }

  // Used by build_fan.
  ConeId add(Cone cone);
  void link_faces();

 private:
  std::vector<Vec> scaled_;
  std::size_t rank_;
  double eps_geom_;
  double scale_;
  std::vector<Cone> cones_;
  std::map<LabelMask, ConeId> by_label_;
};

/// Enumerates every cone M(Z) (deduplicated by maximal Z). Requires rank >= 1
/// and |Y| <= 16.
Fan build_fan(const GroupSpec& spec, const SolverConfig& cfg = {});
Fan build_fan(const std::vector<double>& potential, const std::vector<Vec>& cvec, const SolverConfig& cfg = {});

/// Maximal Z with v ∈ Int M(Z): the generators within eps_geom·scale of
/// max_y v·w_y, closed up to a fan label.
ConeId membership(const Fan& fan, const Vec& v);

/// Near-maximal generator set at v (before closure).
LabelMask argmax_labels(const Fan& fan, const Vec& v);

/// Largest value of q·v over the cone's inequality normals (< 0 strictly
/// inside) and largest |e·v| over its equalities.
struct ConeSlack {
  double inequality = 0.0;
  double equality = 0.0;
};
ConeSlack cone_slack(const Cone& cone, const Vec& v);

struct BoundarySplit {
  double lambda = 1.0;
  Vec boundary;  // P(v)
};

/// The unique (λ, P(v)) with v ∝ (1−λ)·center + λ·P(v), P(v) on the boundary
/// of the cone. Requires dim >= 2, v in the cone and v ≠ center.
BoundarySplit boundary_decompose(const Fan& fan, ConeId id, const Vec& v);

/// Angle between two unit vectors, accurate near zero.
double angle_between(const Vec& a, const Vec& b);

}  // namespace kms
