#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kms {

using Vec = Eigen::VectorXd;

enum class OracleKind { FreeAbelian, Heisenberg, DihedralInfinite, FiniteTable, None };

std::string_view to_string(OracleKind kind);
OracleKind oracle_from_string(std::string_view name);

/// Normal form of a group element. The meaning of the coordinates depends on
/// the oracle: FreeAbelian stores the integer n-tuple, Heisenberg the matrix
/// entries (a, b, c), DihedralInfinite the pair (k, eps) for a^k b^eps and
/// FiniteTable a single table index. Equality is coordinate equality.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::vector<std::int64_t> coords) : coords_(std::move(coords)) {}

  const std::vector<std::int64_t>& coords() const { return coords_; }

  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;

 private:
  std::vector<std::int64_t> coords_;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept;
};

/// A word over the generating set, stored as generator indices.
struct Word {
  std::vector<std::size_t> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  friend bool operator==(const Word&, const Word&) = default;
};

Word concat(const Word& t, const Word& u);

/// Multiplication table for finite groups. Row i, column j holds i*j.
struct FiniteTable {
  std::vector<std::vector<std::size_t>> mult;
  std::size_t identity = 0;
};

/// Raw fields of a group specification, before construction.
struct GroupSpecData {
  std::string name;
  std::vector<std::string> generators;
  std::vector<double> potential;  // F(s), one per generator
  std::size_t rank = 0;
  std::vector<Vec> cvec;  // c_s in R^rank, one per generator
  OracleKind oracle = OracleKind::None;
  std::optional<FiniteTable> table;
  // Oracle normal form of each generator. Optional for FreeAbelian (taken
  // from the integral c-vectors) and for the canonical Heisenberg/D∞ names.
  std::vector<GroupElement> elements;
};

/// Immutable description of (G, Y, F, abelianization) plus a word oracle.
///
/// Construction checks structural consistency (sizes, symbols, oracle data)
/// and throws InputError; the mathematical assumptions are checked
/// separately by validate_spec so that invalid inputs can be reported.
class GroupSpec {
 public:
  explicit GroupSpec(GroupSpecData data);

  const std::string& name() const { return data_.name; }
  std::size_t size() const { return data_.generators.size(); }
  std::size_t rank() const { return data_.rank; }
  OracleKind oracle() const { return data_.oracle; }
  bool has_oracle() const { return data_.oracle != OracleKind::None; }

  const std::vector<std::string>& generators() const { return data_.generators; }
  const std::string& symbol(std::size_t s) const { return data_.generators.at(s); }
  std::optional<std::size_t> index_of(std::string_view symbol) const;

  double potential(std::size_t s) const { return data_.potential[s]; }
  const std::vector<double>& potentials() const { return data_.potential; }
  const Vec& cvec(std::size_t s) const { return data_.cvec[s]; }
  const std::vector<Vec>& cvecs() const { return data_.cvec; }
  const std::optional<FiniteTable>& table() const { return data_.table; }

  /// Parses "a,b,a_inv"; the empty string is the empty word.
  Word parse_word(std::string_view text) const;
  std::string format_word(const Word& w) const;

  // Oracle arithmetic; all throw UnsupportedError when oracle() == None.
  GroupElement identity() const;
  const GroupElement& generator_element(std::size_t s) const;
  GroupElement multiply(const GroupElement& g, const GroupElement& h) const;
  GroupElement endpoint(const Word& t) const;
  bool same_endpoint(const Word& t, const Word& u) const;

  /// c(t̄) = Σ c_{t_i}; defined without an oracle.
  Vec abelianized(const Word& t) const;
  /// Image of an element under the oracle's abelianization map.
  Vec abelianized(const GroupElement& g) const;

  double word_potential(const Word& t) const;

 private:
  void require_oracle() const;

  GroupSpecData data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Built-in groups: "heisenberg", "dihedral_infinite", "zn:<n>", "cyclic:<m>".
GroupSpec builtin_group(std::string_view name);
std::vector<std::string> builtin_group_names();

/// Reads the group JSON format.
GroupSpec group_from_json(const std::string& text);
/// Built-in name or path to a JSON file.
GroupSpec load_group(const std::string& name_or_path);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

/// Checks |Y| >= 2, F > 0, full rank of the c-vectors, the positive spanning
/// property (by extreme-ray enumeration of {v : v.c_s <= 0}) and, when an
/// oracle is present, homomorphism consistency on all words of length <= 4.
ValidationReport validate_spec(const GroupSpec& spec, double eps_geom = 1e-9);

/// Elements reachable by words of length <= R together with their right
/// neighbours g*s (which may lie outside the ball).
struct Ball {
  std::vector<GroupElement> elements;  // BFS order
  std::vector<std::size_t> distance;
  std::vector<std::vector<GroupElement>> neighbors;  // neighbors[i][s] = elements[i]*s
  std::unordered_map<GroupElement, std::size_t, GroupElementHash> index;

  bool contains(const GroupElement& g) const { return index.count(g) != 0; }
};

inline constexpr int kMaxBallRadius = 12;

Ball ball(const GroupSpec& spec, int radius, int max_radius = kMaxBallRadius);

/// Calls f on every word of length exactly `length`, in lexicographic order.
void for_each_word(std::size_t alphabet, std::size_t length,
                   const std::function<void(const Word&)>& f);

}  // namespace kms
