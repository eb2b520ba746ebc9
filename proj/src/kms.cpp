#include "kms_cayley/kms.hpp"

#include "kms_cayley/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kms {

HarmonicVector::HarmonicVector(std::shared_ptr<const GroupSpec> spec, double beta,
                               std::variant<ExponentialPsi, DihedralPsi, TabulatedPsi> data)
    : spec_(std::move(spec)), beta_(beta), data_(std::move(data)) {
  if (!spec_) throw InputError("harmonic vector needs a group");
}

HarmonicVector HarmonicVector::exponential(std::shared_ptr<const GroupSpec> spec, double beta, Vec u) {
  if (static_cast<std::size_t>(u.size()) != spec->rank()) throw InputError("u must have length rank");
  return HarmonicVector(std::move(spec), beta, ExponentialPsi{std::move(u)});
}

double dihedral_c_beta(double beta) {
  const double half = 0.5 * std::exp(beta);
  if (half < 1.0 - 1e-15) throw DomainError("no positive dihedral harmonic vectors for beta < log 2");
  return std::acosh(std::max(1.0, half));
}

HarmonicVector HarmonicVector::dihedral(std::shared_ptr<const GroupSpec> spec, double beta, double t) {
  if (spec->oracle() != OracleKind::DihedralInfinite) throw UnsupportedError("dihedral family needs the D∞ oracle");
  if (spec->size() != 2) throw UnsupportedError("dihedral family is defined for Y = {a, b}");
  for (double f : spec->potentials()) {
    if (f != 1.0) throw UnsupportedError("dihedral family is defined for the gauge action F ≡ 1");
  }
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("dihedral t-parameter must lie in [0, 1]");
  const double c = dihedral_c_beta(beta);
  return HarmonicVector(std::move(spec), beta, DihedralPsi{t, c});
}

HarmonicVector HarmonicVector::tabulated(std::shared_ptr<const GroupSpec> spec, double beta, TabulatedPsi values) {
  if (!spec->has_oracle()) throw UnsupportedError("tabulated vectors need a word oracle");
  return HarmonicVector(std::move(spec), beta, std::move(values));
}

namespace {

double dihedral_x(const DihedralPsi& d, double n) {
  return d.t * std::exp(d.c_beta * n) + (1.0 - d.t) * std::exp(-d.c_beta * n);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double psi_eval(const HarmonicVector& psi, const GroupElement& g) {
  const auto& spec = psi.spec();
  return std::visit(
      Overloaded{
          [&](const ExponentialPsi& e) {
            return spec.rank() == 0 ? 1.0 : std::exp(e.u.dot(spec.abelianized(g)));
          },
          [&](const DihedralPsi& d) {
            const auto k = static_cast<double>(g.coords().at(0));
            return g.coords().at(1) == 0 ? dihedral_x(d, k) : dihedral_x(d, k - 1.0);
          },
          [&](const TabulatedPsi& t) {
            auto it = t.values.find(g);
            if (it == t.values.end()) throw DomainError("tabulated harmonic vector: element outside the table");
            return it->second;
          }},
      psi.data());
}

double psi_eval(const HarmonicVector& psi, const Word& t) {
  if (const auto* e = std::get_if<ExponentialPsi>(&psi.data())) {
    return psi.spec().rank() == 0 ? 1.0 : std::exp(e->u.dot(psi.spec().abelianized(t)));
  }
  return psi_eval(psi, psi.spec().endpoint(t));
}

double harmonic_residual(const HarmonicVector& psi, int radius) {
  const auto& spec = psi.spec();
  const Ball b = ball(spec, radius);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.elements.size(); ++i) {
    double sum = 0.0;
    for (std::size_t s = 0; s < spec.size(); ++s) {
      sum += std::exp(-psi.beta() * spec.potential(s)) * psi_eval(psi, b.neighbors[i][s]);
    }
    worst = std::max(worst, std::abs(sum - psi_eval(psi, b.elements[i])));
  }
  return worst;
}

double cylinder_mass(const HarmonicVector& psi, const Word& t) {
  if (t.empty()) return 1.0;
  return std::exp(-psi.beta() * psi.spec().word_potential(t)) * psi_eval(psi, t);
}

double markov_cylinder_mass(const HarmonicVector& psi, const Word& t) {
  const auto& spec = psi.spec();
  GroupElement g = spec.identity();
  double mass = 1.0;
  for (auto letter : t.letters) {
    double row = 0.0;
    double chosen = 0.0;
    for (std::size_t s = 0; s < spec.size(); ++s) {
      const double w = std::exp(-psi.beta() * spec.potential(s)) *
                       psi_eval(psi, spec.multiply(g, spec.generator_element(s)));
      row += w;
      if (s == letter) chosen = w;
    }
    if (!(row > 0.0)) return 0.0;
    mass *= chosen / row;
    g = spec.multiply(g, spec.generator_element(letter));
  }
  return mass;
}

double kms_condition_check(const HarmonicVector& psi, int max_length) {
  if (max_length < 0 || max_length > 6) throw InputError("kms_condition_check: L must lie in [0, 6]");
  const auto& spec = psi.spec();
  std::unordered_map<GroupElement, std::pair<double, double>, GroupElementHash> range;
  double worst = 0.0;
  for (int len = 0; len <= max_length; ++len) {
    for_each_word(spec.size(), static_cast<std::size_t>(len), [&](const Word& w) {
      const double value = std::exp(psi.beta() * spec.word_potential(w)) * markov_cylinder_mass(psi, w);
      auto [it, inserted] = range.emplace(spec.endpoint(w), std::pair{value, value});
      if (inserted) return;
      it->second.first = std::min(it->second.first, value);
      it->second.second = std::max(it->second.second, value);
      worst = std::max(worst, it->second.second - it->second.first);
    });
  }
  return worst;
}

double q_beta_residual(const PartitionData& data, const QBetaPoint& point) {
  return std::abs(data.weights(point.u, point.beta).sum() - 1.0);
}

std::vector<double> bernoulli_vector(const PartitionData& data, const QBetaPoint& point) {
  const Vec w = data.weights(point.u, point.beta);
  return {w.data(), w.data() + w.size()};
}

KmsState::KmsState(double beta, std::vector<MixtureAtom> mixture) : beta_(beta), mixture_(std::move(mixture)) {
  if (mixture_.empty()) throw InputError("KMS state needs at least one mixture atom");
  double total = 0.0;
  for (const auto& a : mixture_) {
    if (!(a.weight >= 0.0)) throw InputError("mixture weights must be non-negative");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("mixture weights must sum to 1");
}

HarmonicVector atom_vector(std::shared_ptr<const GroupSpec> spec, double beta, const MixtureAtom& atom) {
  if (const auto* q = std::get_if<QBetaPoint>(&atom.extreme)) {
    return HarmonicVector::exponential(std::move(spec), beta, q->u);
  }
  return HarmonicVector::dihedral(std::move(spec), beta, std::get<DihedralAtom>(atom.extreme).t);
}

double state_eval(std::shared_ptr<const GroupSpec> spec, const KmsState& state, const Word& t, const Word& u) {
  if (!spec->same_endpoint(t, u)) {
    throw DomainError("V_t V_u* is not in the algebra: the words have different endpoints");
  }
  if (!(t == u)) return 0.0;
  double value = 0.0;
  for (const auto& atom : state.mixture()) {
    if (atom.weight == 0.0) continue;
    value += atom.weight * cylinder_mass(atom_vector(spec, state.beta(), atom), t);
  }
  return value;
}

QBetaSample sample_q_beta(const GroupSpec& spec, double beta, std::size_t K, const SolverConfig& cfg) {
  if (spec.rank() == 0) throw UnsupportedError("sample_q_beta: rank 0, use critical_beta (Q(β) ⊆ {0})");
  const PartitionData data(spec);
  QBetaSample out;
  out.beta0 = critical_beta(data, cfg);
  if (std::abs(beta - out.beta0) <= cfg.eps_geom) {
    out.kind = QBetaCase::Critical;
    out.points.push_back({u_of_beta(data, out.beta0, cfg), out.beta0});
    return out;
  }
  if (beta < out.beta0) {
    out.kind = QBetaCase::Empty;
    return out;
  }
  out.kind = QBetaCase::Sphere;
  const Vec u0 = u_of_beta(data, beta, cfg);
  for (const auto& v : sphere_grid(spec.rank(), K)) {
    const double t = radial_root(data, beta, u0, v, cfg);
    out.points.push_back({u0 + t * v, beta});
    out.directions.push_back(v);
  }
  return out;
}

}  // namespace kms
