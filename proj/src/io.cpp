#include "kms_cayley/io.hpp"

#include "kms_cayley/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace kms {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.17g", x);
  return buf;
}

namespace {

void dump(const nlohmann::json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case nlohmann::json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump(it.value(), indent, depth + 1, out);
      }
      out += nl + close_pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays stay on one line.
      bool flat = j.size() <= 16;
      for (const auto& x : j) flat = flat && x.is_primitive();
      out += "[";
      bool first = true;
      for (const auto& x : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) out += nl + pad;
        first = false;
        dump(x, indent, depth + 1, out);
      }
      if (!flat) out += nl + close_pad;
      out += "]";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  return out;
}

Vec parse_vector(std::string_view text) {
  std::vector<double> xs;
  std::string s(text);
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) throw InputError("bad number '" + tok + "' in vector");
    while (*end == ' ') ++end;
    if (*end != '\0') throw InputError("bad number '" + tok + "' in vector");
    xs.push_back(x);
  }
  if (xs.empty()) throw InputError("empty vector");
  return Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

nlohmann::json to_json(const Vec& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

nlohmann::json to_json(const LimitPoint& p, const GroupSpec& spec) {
  auto obj = nlohmann::json::object();
  auto values = nlohmann::json::array();
  auto support = nlohmann::json::array();
  for (std::size_t s = 0; s < p.p.size(); ++s) {
    values.push_back(p.p[s]);
    if (p.support[s]) support.push_back(spec.symbol(s));
  }
  obj["p"] = values;
  obj["support"] = support;
  return obj;
}

KmsState state_from_json(const nlohmann::json& j, const GroupSpec& spec) {
  try {
    const double beta = j.at("beta").get<double>();
    std::vector<MixtureAtom> atoms;
    for (const auto& a : j.at("mixture")) {
      MixtureAtom atom;
      atom.weight = a.at("w").get<double>();
      if (a.contains("dihedral_t")) {
        atom.extreme = DihedralAtom{a.at("dihedral_t").get<double>()};
      } else {
        auto u = a.contains("u") ? a.at("u").get<std::vector<double>>() : std::vector<double>{};
        if (u.size() != spec.rank()) throw InputError("state atom u must have length rank");
        atom.extreme = QBetaPoint{Eigen::Map<Vec>(u.data(), static_cast<Eigen::Index>(u.size())), beta};
      }
      atoms.push_back(std::move(atom));
    }
    return KmsState(beta, std::move(atoms));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid state JSON: ") + e.what());
  }
}

nlohmann::json state_to_json(const KmsState& state) {
  nlohmann::json j;
  j["beta"] = state.beta();
  auto mix = nlohmann::json::array();
  for (const auto& a : state.mixture()) {
    nlohmann::json item;
    item["w"] = a.weight;
    if (const auto* q = std::get_if<QBetaPoint>(&a.extreme)) {
      item["u"] = to_json(q->u);
    } else {
      item["dihedral_t"] = std::get<DihedralAtom>(a.extreme).t;
    }
    mix.push_back(item);
  }
  j["mixture"] = mix;
  return j;
}

}  // namespace kms
