#include "kms_cayley/group.hpp"

#include "kms_cayley/error.hpp"
#include "kms_cayley/polyhedral.hpp"

#include <json.hpp>

#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace kms {

namespace {

constexpr std::string_view kOracleNames[] = {"free_abelian", "heisenberg", "dihedral_infinite",
                                             "finite_table", "none"};

std::int64_t round_integral(double x, const std::string& what) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-12) throw InputError(what + " must be integral for the free_abelian oracle");
  return static_cast<std::int64_t>(r);
}

std::optional<GroupElement> canonical_element(OracleKind oracle, const std::string& symbol) {
  using E = std::vector<std::int64_t>;
  if (oracle == OracleKind::Heisenberg) {
    if (symbol == "a") return GroupElement(E{1, 0, 0});
    if (symbol == "a_inv") return GroupElement(E{-1, 0, 0});
    if (symbol == "b") return GroupElement(E{0, 1, 0});
    if (symbol == "b_inv") return GroupElement(E{0, -1, 0});
    if (symbol == "c") return GroupElement(E{0, 0, 1});
    if (symbol == "c_inv") return GroupElement(E{0, 0, -1});
  } else if (oracle == OracleKind::DihedralInfinite) {
    if (symbol == "a") return GroupElement(E{1, 0});
    if (symbol == "a_inv") return GroupElement(E{-1, 0});
    if (symbol == "b") return GroupElement(E{0, 1});
  }
  return std::nullopt;
}

std::size_t element_arity(OracleKind oracle, std::size_t rank) {
  switch (oracle) {
    case OracleKind::FreeAbelian: return rank;
    case OracleKind::Heisenberg: return 3;
    case OracleKind::DihedralInfinite: return 2;
    case OracleKind::FiniteTable: return 1;
    case OracleKind::None: return 0;
  }
  return 0;
}

}  // namespace

std::string_view to_string(OracleKind kind) { return kOracleNames[static_cast<int>(kind)]; }

OracleKind oracle_from_string(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kOracleNames[i] == name) return static_cast<OracleKind>(i);
  }
  throw InputError("unknown oracle '" + std::string(name) + "'");
}

std::size_t GroupElementHash::operator()(const GroupElement& g) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto c : g.coords()) {
    h ^= std::hash<std::int64_t>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Word concat(const Word& t, const Word& u) {
  Word w = t;
  w.letters.insert(w.letters.end(), u.letters.begin(), u.letters.end());
  return w;
}

GroupSpec::GroupSpec(GroupSpecData data) : data_(std::move(data)) {
  const std::size_t m = data_.generators.size();
  if (data_.potential.size() != m) throw InputError("F must have one value per generator");
  if (data_.cvec.size() != m) throw InputError("c must have one vector per generator");
  for (std::size_t s = 0; s < m; ++s) {
    const auto& sym = data_.generators[s];
    if (sym.empty() || sym.find(',') != std::string::npos) {
      throw InputError("invalid generator symbol '" + sym + "'");
    }
    if (!index_.emplace(sym, s).second) throw InputError("duplicate generator symbol '" + sym + "'");
    if (static_cast<std::size_t>(data_.cvec[s].size()) != data_.rank) {
      throw InputError("c-vector of '" + sym + "' has wrong length");
    }
    if (!std::isfinite(data_.potential[s])) throw InputError("F('" + sym + "') is not finite");
  }

  if (data_.oracle == OracleKind::None) {
    data_.elements.clear();
    return;
  }
  if (data_.oracle == OracleKind::FiniteTable) {
    if (!data_.table) throw InputError("finite_table oracle requires a table");
    const auto& mult = data_.table->mult;
    for (const auto& row : mult) {
      if (row.size() != mult.size()) throw InputError("multiplication table must be square");
      for (auto x : row) {
        if (x >= mult.size()) throw InputError("multiplication table entry out of range");
      }
    }
    if (data_.table->identity >= mult.size()) throw InputError("table identity out of range");
  }
  if (data_.elements.empty()) {
    for (std::size_t s = 0; s < m; ++s) {
      if (data_.oracle == OracleKind::FreeAbelian) {
        std::vector<std::int64_t> coords;
        for (Eigen::Index i = 0; i < data_.cvec[s].size(); ++i) {
          coords.push_back(round_integral(data_.cvec[s][i], "c('" + data_.generators[s] + "')"));
        }
        data_.elements.emplace_back(std::move(coords));
      } else if (auto e = canonical_element(data_.oracle, data_.generators[s])) {
        data_.elements.push_back(*e);
      } else {
        throw InputError("no group element given for generator '" + data_.generators[s] + "'");
      }
    }
  }
  if (data_.elements.size() != m) throw InputError("elements must have one entry per generator");
  const std::size_t arity = element_arity(data_.oracle, data_.rank);
  for (const auto& e : data_.elements) {
    if (e.coords().size() != arity) throw InputError("group element has wrong arity for the oracle");
    if (data_.oracle == OracleKind::DihedralInfinite && e.coords()[1] != 0 && e.coords()[1] != 1) {
      throw InputError("dihedral element must have eps in {0,1}");
    }
    if (data_.oracle == OracleKind::FiniteTable &&
        (e.coords()[0] < 0 || static_cast<std::size_t>(e.coords()[0]) >= data_.table->mult.size())) {
      throw InputError("finite table element out of range");
    }
  }
}

std::optional<std::size_t> GroupSpec::index_of(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Word GroupSpec::parse_word(std::string_view text) const {
  Word w;
  if (text.empty()) return w;
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(',', start);
    std::string_view tok = text.substr(start, end == std::string_view::npos ? end : end - start);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    auto idx = index_of(tok);
    if (!idx) throw InputError("unknown generator '" + std::string(tok) + "' in word");
    w.letters.push_back(*idx);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return w;
}

std::string GroupSpec::format_word(const Word& w) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ',';
    out += symbol(w.letters[i]);
  }
  return out;
}

void GroupSpec::require_oracle() const {
  if (!has_oracle()) throw UnsupportedError("group '" + name() + "' has no word oracle");
}

GroupElement GroupSpec::identity() const {
  require_oracle();
  switch (data_.oracle) {
    case OracleKind::FreeAbelian: return GroupElement(std::vector<std::int64_t>(data_.rank, 0));
    case OracleKind::Heisenberg: return GroupElement({0, 0, 0});
    case OracleKind::DihedralInfinite: return GroupElement({0, 0});
    case OracleKind::FiniteTable:
      return GroupElement({static_cast<std::int64_t>(data_.table->identity)});
    case OracleKind::None: break;
  }
  throw UnsupportedError("no oracle");
}

const GroupElement& GroupSpec::generator_element(std::size_t s) const {
  require_oracle();
  return data_.elements.at(s);
}

GroupElement GroupSpec::multiply(const GroupElement& g, const GroupElement& h) const {
  require_oracle();
  const auto& x = g.coords();
  const auto& y = h.coords();
  switch (data_.oracle) {
    case OracleKind::FreeAbelian: {
      std::vector<std::int64_t> z(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
      return GroupElement(std::move(z));
    }
    case OracleKind::Heisenberg:
      // [[1,a,c],[0,1,b],[0,0,1]] * [[1,a',c'],[0,1,b'],[0,0,1]]
      return GroupElement({x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]});
    case OracleKind::DihedralInfinite:
      // a^k b^e * a^k' b^e' = a^(k + (-1)^e k') b^(e xor e')
      return GroupElement({x[0] + (x[1] ? -y[0] : y[0]), x[1] ^ y[1]});
    case OracleKind::FiniteTable:
      return GroupElement({static_cast<std::int64_t>(
          data_.table->mult[static_cast<std::size_t>(x[0])][static_cast<std::size_t>(y[0])])});
    case OracleKind::None: break;
  }
  throw UnsupportedError("no oracle");
}

GroupElement GroupSpec::endpoint(const Word& t) const {
  GroupElement g = identity();
  for (auto s : t.letters) g = multiply(g, data_.elements.at(s));
  return g;
}

bool GroupSpec::same_endpoint(const Word& t, const Word& u) const { return endpoint(t) == endpoint(u); }

Vec GroupSpec::abelianized(const Word& t) const {
  Vec out = Vec::Zero(static_cast<Eigen::Index>(data_.rank));
  for (auto s : t.letters) out += data_.cvec.at(s);
  return out;
}

Vec GroupSpec::abelianized(const GroupElement& g) const {
  require_oracle();
  const auto n = static_cast<Eigen::Index>(data_.rank);
  Vec out = Vec::Zero(n);
  switch (data_.oracle) {
    case OracleKind::FreeAbelian:
      for (Eigen::Index i = 0; i < n; ++i) out[i] = static_cast<double>(g.coords()[static_cast<std::size_t>(i)]);
      break;
    case OracleKind::Heisenberg:
      if (n >= 1) out[0] = static_cast<double>(g.coords()[0]);
      if (n >= 2) out[1] = static_cast<double>(g.coords()[1]);
      break;
    case OracleKind::DihedralInfinite:
    case OracleKind::FiniteTable:
    case OracleKind::None:
      break;
  }
  return out;
}

double GroupSpec::word_potential(const Word& t) const {
  double f = 0.0;
  for (auto s : t.letters) f += data_.potential.at(s);
  return f;
}

void for_each_word(std::size_t alphabet, std::size_t length, const std::function<void(const Word&)>& f) {
  Word w;
  w.letters.assign(length, 0);
  if (length > 0 && alphabet == 0) return;
  while (true) {
    f(w);
    std::size_t i = length;
    while (i > 0) {
      --i;
      if (++w.letters[i] < alphabet) break;
      w.letters[i] = 0;
      if (i == 0) return;
    }
    if (length == 0) return;
  }
}

// ---------------------------------------------------------------------------
// Built-ins and JSON

namespace {

GroupSpec make_heisenberg() {
  GroupSpecData d;
  d.name = "heisenberg";
  d.generators = {"a", "a_inv", "b", "b_inv", "c", "c_inv"};
  d.potential.assign(6, 1.0);
  d.rank = 2;
  auto v = [](double x, double y) { Vec r(2); r << x, y; return r; };
  d.cvec = {v(1, 0), v(-1, 0), v(0, 1), v(0, -1), v(0, 0), v(0, 0)};
  d.oracle = OracleKind::Heisenberg;
  return GroupSpec(std::move(d));
}

GroupSpec make_dihedral() {
  GroupSpecData d;
  d.name = "dihedral_infinite";
  d.generators = {"a", "b"};
  d.potential = {1.0, 1.0};
  d.rank = 0;
  d.cvec = {Vec(0), Vec(0)};
  d.oracle = OracleKind::DihedralInfinite;
  return GroupSpec(std::move(d));
}

GroupSpec make_zn(std::size_t n) {
  if (n == 0) throw InputError("zn:<n> requires n >= 1");
  GroupSpecData d;
  d.name = "zn:" + std::to_string(n);
  d.rank = n;
  d.oracle = OracleKind::FreeAbelian;
  for (std::size_t i = 0; i < n; ++i) {
    for (int sign : {1, -1}) {
      if (n == 1) {
        d.generators.push_back(sign > 0 ? "+1" : "-1");
      } else {
        d.generators.push_back("e" + std::to_string(i + 1) + (sign > 0 ? "" : "_inv"));
      }
      d.potential.push_back(1.0);
      Vec c = Vec::Zero(static_cast<Eigen::Index>(n));
      c[static_cast<Eigen::Index>(i)] = sign;
      d.cvec.push_back(c);
    }
  }
  return GroupSpec(std::move(d));
}

GroupSpec make_cyclic(std::size_t m) {
  if (m == 0) throw InputError("cyclic:<m> requires m >= 1");
  GroupSpecData d;
  d.name = "cyclic:" + std::to_string(m);
  d.generators = {"g", "g_inv"};
  d.potential = {1.0, 1.0};
  d.rank = 0;
  d.cvec = {Vec(0), Vec(0)};
  d.oracle = OracleKind::FiniteTable;
  FiniteTable table;
  table.mult.assign(m, std::vector<std::size_t>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) table.mult[i][j] = (i + j) % m;
  }
  d.table = std::move(table);
  d.elements = {GroupElement({static_cast<std::int64_t>(1 % m)}),
                GroupElement({static_cast<std::int64_t>((m - 1) % m)})};
  return GroupSpec(std::move(d));
}

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  if (text.empty()) throw InputError(std::string(what) + " needs a number");
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw InputError("bad number in '" + std::string(what) + "'");
    value = value * 10 + static_cast<std::size_t>(ch - '0');
    if (value > 1000000) throw InputError("number too large in '" + std::string(what) + "'");
  }
  return value;
}

}  // namespace

GroupSpec builtin_group(std::string_view name) {
  if (name == "heisenberg") return make_heisenberg();
  if (name == "dihedral_infinite") return make_dihedral();
  if (name.rfind("zn:", 0) == 0) return make_zn(parse_count(name.substr(3), name));
  if (name.rfind("cyclic:", 0) == 0) return make_cyclic(parse_count(name.substr(7), name));
  throw InputError("unknown built-in group '" + std::string(name) + "'");
}

std::vector<std::string> builtin_group_names() {
  return {"heisenberg", "dihedral_infinite", "zn:<n>", "cyclic:<m>"};
}

GroupSpec group_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed group JSON: ") + e.what());
  }
  try {
    GroupSpecData d;
    d.name = j.value("name", std::string("custom"));
    d.generators = j.at("generators").get<std::vector<std::string>>();
    d.rank = j.at("rank").get<std::size_t>();
    d.oracle = oracle_from_string(j.value("oracle", std::string("none")));
    const auto& f = j.at("F");
    const auto& c = j.contains("c") ? j.at("c") : nlohmann::json::object();
    for (const auto& sym : d.generators) {
      if (!f.contains(sym)) throw InputError("F missing for generator '" + sym + "'");
      d.potential.push_back(f.at(sym).get<double>());
      Vec v = Vec::Zero(static_cast<Eigen::Index>(d.rank));
      if (c.contains(sym)) {
        auto xs = c.at(sym).get<std::vector<double>>();
        if (xs.size() != d.rank) throw InputError("c('" + sym + "') must have length rank");
        for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = xs[i];
      } else if (d.rank != 0) {
        throw InputError("c missing for generator '" + sym + "'");
      }
      d.cvec.push_back(v);
    }
    if (j.contains("table") && !j.at("table").is_null()) {
      const auto& t = j.at("table");
      FiniteTable table;
      if (t.is_array()) {
        table.mult = t.get<std::vector<std::vector<std::size_t>>>();
      } else {
        table.mult = t.at("mult").get<std::vector<std::vector<std::size_t>>>();
        table.identity = t.value("identity", std::size_t{0});
      }
      d.table = std::move(table);
    }
    if (j.contains("elements")) {
      const auto& e = j.at("elements");
      for (const auto& sym : d.generators) {
        if (!e.contains(sym)) throw InputError("elements missing generator '" + sym + "'");
        const auto& x = e.at(sym);
        if (x.is_number_integer()) {
          d.elements.emplace_back(std::vector<std::int64_t>{x.get<std::int64_t>()});
        } else {
          d.elements.emplace_back(x.get<std::vector<std::int64_t>>());
        }
      }
    }
    return GroupSpec(std::move(d));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid group JSON: ") + e.what());
  }
}

GroupSpec load_group(const std::string& name_or_path) {
  const bool looks_builtin = name_or_path == "heisenberg" || name_or_path == "dihedral_infinite" ||
                             name_or_path.rfind("zn:", 0) == 0 || name_or_path.rfind("cyclic:", 0) == 0;
  if (looks_builtin) return builtin_group(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) throw InputError("unknown group '" + name_or_path + "' (not a built-in or readable file)");
  std::stringstream ss;
  ss << in.rdbuf();
  return group_from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_spec(const GroupSpec& spec, double eps_geom) {
  ValidationReport report;
  const std::size_t m = spec.size();
  const auto n = static_cast<Eigen::Index>(spec.rank());

  if (m < 2) report.violations.push_back("generating set must have at least two elements");
  for (std::size_t s = 0; s < m; ++s) {
    if (!(spec.potential(s) > 0.0)) {
      report.violations.push_back("F('" + spec.symbol(s) + "') must be positive");
    }
  }
  if (matrix_rank(spec.cvecs(), n, eps_geom) != n) {
    report.violations.push_back("c-vectors do not span R^" + std::to_string(n));
  }
  if (n > 0) {
    // {v : v.c_s <= 0 for all s} must be {0}.
    auto rays = extreme_rays(spec.cvecs(), {}, n, eps_geom);
    if (!rays.empty()) {
      std::ostringstream msg;
      msg << "positive spanning fails: nonzero v with v.c_s <= 0 for all s, v = (";
      for (Eigen::Index i = 0; i < n; ++i) msg << (i ? "," : "") << rays.front()[i];
      msg << ")";
      report.violations.push_back(msg.str());
    }
  }

  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t r = s + 1; r < m; ++r) {
      if (!(spec.potential(s) > 0.0 && spec.potential(r) > 0.0)) continue;
      const Vec ws = spec.cvec(s) / spec.potential(s);
      const Vec wr = spec.cvec(r) / spec.potential(r);
      const double gap = (ws - wr).norm();
      if (gap > 0.0 && gap < eps_geom) {
        report.warnings.push_back("c/F of '" + spec.symbol(s) + "' and '" + spec.symbol(r) +
                                  "' differ by less than eps_geom; they are merged in the fan");
      }
    }
  }

  if (spec.has_oracle() && m > 0) {
    for (std::size_t s = 0; s < m; ++s) {
      if ((spec.abelianized(spec.generator_element(s)) - spec.cvec(s)).norm() > eps_geom) {
        report.violations.push_back("c('" + spec.symbol(s) +
                                    "') disagrees with the oracle's abelianization of the generator");
      }
    }
    // c(t) must depend only on the endpoint of t.
    std::unordered_map<GroupElement, Vec, GroupElementHash> seen;
    bool consistent = true;
    for (std::size_t len = 0; len <= 4 && consistent; ++len) {
      for_each_word(m, len, [&](const Word& w) {
        if (!consistent) return;
        auto g = spec.endpoint(w);
        Vec c = spec.abelianized(w);
        auto [it, inserted] = seen.emplace(g, c);
        if (!inserted && (it->second - c).norm() > eps_geom * std::max(1.0, c.norm())) {
          consistent = false;
          report.violations.push_back("abelianization is not a homomorphism: word '" + spec.format_word(w) +
                                      "' conflicts with an earlier word of the same endpoint");
        }
      });
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Balls

Ball ball(const GroupSpec& spec, int radius, int max_radius) {
  if (radius < 0) throw InputError("ball radius must be non-negative");
  if (radius > max_radius) {
    throw InputError("ball radius " + std::to_string(radius) + " exceeds R_max = " + std::to_string(max_radius));
  }
  Ball b;
  const std::size_t m = spec.size();
  auto add = [&](const GroupElement& g, std::size_t dist) {
    b.index.emplace(g, b.elements.size());
    b.elements.push_back(g);
    b.distance.push_back(dist);
  };
  add(spec.identity(), 0);
  std::size_t frontier_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    const std::size_t frontier_end = b.elements.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      for (std::size_t s = 0; s < m; ++s) {
        auto h = spec.multiply(b.elements[i], spec.generator_element(s));
        if (!b.contains(h)) add(h, static_cast<std::size_t>(r));
      }
    }
    frontier_begin = frontier_end;
  }
  b.neighbors.resize(b.elements.size());
  for (std::size_t i = 0; i < b.elements.size(); ++i) {
    for (std::size_t s = 0; s < m; ++s) b.neighbors[i].push_back(spec.multiply(b.elements[i], spec.generator_element(s)));
  }
  return b;
}

}  // namespace kms
