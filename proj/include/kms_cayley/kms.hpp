#pragma once

#include "kms_cayley/group.hpp"
#include "kms_cayley/numerics.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace kms {

/// ψ_g = exp(u·c(g)); extreme abelian harmonic vector when u ∈ Q(β).
struct ExponentialPsi {
  Vec u;
};

/// The closed-form family of β-harmonic vectors on D∞ with Y = {a, b}:
/// ψ(a^n) = t e^{cn} + (1−t) e^{−cn}, ψ(a^n b) = ψ(a^{n−1}),
/// where c = c_beta solves e^c + e^{−c} = e^β.
struct DihedralPsi {
  double t = 0.0;
  double c_beta = 0.0;
};

/// Values tabulated on a finite set of elements.
struct TabulatedPsi {
  std::unordered_map<GroupElement, double, GroupElementHash> values;
};

/// A vector ψ : G → [0, ∞) together with its inverse temperature.
class HarmonicVector {
 public:
  static HarmonicVector exponential(std::shared_ptr<const GroupSpec> spec, double beta, Vec u);
  /// Requires the DihedralInfinite oracle, F ≡ 1 and β >= log 2.
  static HarmonicVector dihedral(std::shared_ptr<const GroupSpec> spec, double beta, double t);
  static HarmonicVector tabulated(std::shared_ptr<const GroupSpec> spec, double beta, TabulatedPsi values);

  double beta() const { return beta_; }
  const GroupSpec& spec() const { return *spec_; }
  const std::shared_ptr<const GroupSpec>& spec_ptr() const { return spec_; }
  const std::variant<ExponentialPsi, DihedralPsi, TabulatedPsi>& data() const { return data_; }

 private:
  HarmonicVector(std::shared_ptr<const GroupSpec> spec, double beta,
                 std::variant<ExponentialPsi, DihedralPsi, TabulatedPsi> data);

  std::shared_ptr<const GroupSpec> spec_;
  double beta_;
  std::variant<ExponentialPsi, DihedralPsi, TabulatedPsi> data_;
};

/// Positive solution of e^c + e^{−c} = e^β (β >= log 2).
double dihedral_c_beta(double beta);

double psi_eval(const HarmonicVector& psi, const GroupElement& g);
/// Exponential vectors are evaluated from the word directly (no oracle needed).
double psi_eval(const HarmonicVector& psi, const Word& t);

/// max over ball(R) of |Σ_s e^{−βF(s)} ψ_{gs} − ψ_g|.
double harmonic_residual(const HarmonicVector& psi, int radius);

/// m(tY^ℕ) = e^{−βF(t)} ψ_{t̄}.
double cylinder_mass(const HarmonicVector& psi, const Word& t);

/// Cylinder mass of the Markov measure started at e₀ with transitions
/// p(g, gs) = e^{−βF(s)} ψ_{gs} / Σ_y e^{−βF(y)} ψ_{gy}. For harmonic ψ this
/// agrees with cylinder_mass; for other ψ it is still a probability measure.
double markov_cylinder_mass(const HarmonicVector& psi, const Word& t);

/// max over word pairs of length <= L with equal endpoints of
/// |e^{βF(t)} m(t·) − e^{βF(u)} m(u·)|, m the Markov measure of ψ.
double kms_condition_check(const HarmonicVector& psi, int max_length);

/// A homomorphism c(s) = u·c_s lying on Q(β).
struct QBetaPoint {
  Vec u;
  double beta = 0.0;
};

/// Residual |Σ_s e^{u·c_s − βF(s)} − 1|.
double q_beta_residual(const PartitionData& data, const QBetaPoint& point);

/// Bernoulli probability vector p_s = e^{u·c_s − βF(s)}.
std::vector<double> bernoulli_vector(const PartitionData& data, const QBetaPoint& point);

struct DihedralAtom {
  double t = 0.0;
};

struct MixtureAtom {
  double weight = 0.0;
  std::variant<QBetaPoint, DihedralAtom> extreme;
};

/// A finite convex combination of extreme β-KMS states.
class KmsState {
 public:
  KmsState(double beta, std::vector<MixtureAtom> mixture);

  double beta() const { return beta_; }
  const std::vector<MixtureAtom>& mixture() const { return mixture_; }

 private:
  double beta_;
  std::vector<MixtureAtom> mixture_;
};

HarmonicVector atom_vector(std::shared_ptr<const GroupSpec> spec, double beta, const MixtureAtom& atom);

/// ω(V_t V_u*): the weighted cylinder mass when t = u, 0 when t ≠ u.
/// Throws DomainError when t̄ ≠ ū.
double state_eval(std::shared_ptr<const GroupSpec> spec, const KmsState& state, const Word& t, const Word& u);

enum class QBetaCase { Empty, Critical, Sphere };

struct QBetaSample {
  QBetaCase kind = QBetaCase::Empty;
  double beta0 = 0.0;
  std::vector<QBetaPoint> points;
  std::vector<Vec> directions;  // the sphere directions for Sphere samples
};

/// Q(β) sampled on sphere_grid(n, K). Requires rank >= 1.
QBetaSample sample_q_beta(const GroupSpec& spec, double beta, std::size_t K, const SolverConfig& cfg = {});

}  // namespace kms
