#include "kms_cayley/cli.hpp"

#include "kms_cayley/cone_fan.hpp"
#include "kms_cayley/error.hpp"
#include "kms_cayley/io.hpp"
#include "kms_cayley/kms.hpp"
#include "kms_cayley/n_infinity.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace kms {

namespace {

using nlohmann::json;

constexpr double kHarmonicTol = 1e-10;

struct Options {
  std::string group = "heisenberg";
  std::string format;
  bool check = false;
  SolverConfig cfg;

  std::optional<double> beta;
  bool beta_critical = false;
  std::string v;
  std::string u_vec;
  std::optional<double> dihedral_t;
  std::string state_file;
  std::string t_word;
  std::string u_word;
  std::size_t K = 64;
  int radius = 6;
  int length = 4;
  std::size_t grid = 0;
};

struct CheckFailed : Error {
  using Error::Error;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--group", o.group, "built-in name (heisenberg, dihedral_infinite, zn:<n>, cyclic:<m>) or JSON file");
  sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_flag("--check", o.check, "re-verify the defining residual and fail if it is above tolerance");
  sub->add_option("--eps-root", o.cfg.eps_root);
  sub->add_option("--eps-grad", o.cfg.eps_grad);
  sub->add_option("--eps-geom", o.cfg.eps_geom);
  sub->add_option("--eps-limit", o.cfg.eps_limit);
  sub->add_option("--max-iter", o.cfg.max_iter);
}

void add_state_options(CLI::App* sub, Options& o) {
  sub->add_option("--beta", o.beta, "inverse temperature");
  sub->add_flag("--beta-critical", o.beta_critical, "use the critical inverse temperature");
  sub->add_option("--v", o.v, "direction selecting the extreme point u(β) + t_β(v) v of Q(β)");
  sub->add_option("--u-vec", o.u_vec, "explicit homomorphism u (not required to lie on Q(β))");
  sub->add_option("--dihedral-t", o.dihedral_t, "D∞ family parameter in [0, 1]");
  sub->add_option("--state", o.state_file, "state JSON file");
}

void require_check(bool ok, const std::string& what) {
  if (!ok) throw CheckFailed("check failed: " + what);
}

json vec_json(const Vec& v) { return to_json(v); }

double resolve_beta(const Options& o, const PartitionData& data) {
  if (o.beta_critical) return critical_beta(data, o.cfg);
  if (!o.beta) throw InputError("--beta or --beta-critical is required");
  return *o.beta;
}

KmsState resolve_state(const Options& o, const std::shared_ptr<const GroupSpec>& spec, const PartitionData& data) {
  if (!o.state_file.empty()) {
    std::ifstream in(o.state_file);
    if (!in) throw InputError("cannot read state file '" + o.state_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
      j = json::parse(ss.str());
    } catch (const json::exception& e) {
      throw InputError(std::string("malformed state JSON: ") + e.what());
    }
    return state_from_json(j, *spec);
  }
  const double beta = resolve_beta(o, data);
  if (o.dihedral_t) return KmsState(beta, {MixtureAtom{1.0, DihedralAtom{*o.dihedral_t}}});
  if (!o.u_vec.empty()) {
    Vec u = parse_vector(o.u_vec);
    if (static_cast<std::size_t>(u.size()) != spec->rank()) throw InputError("--u-vec must have length rank");
    return KmsState(beta, {MixtureAtom{1.0, QBetaPoint{u, beta}}});
  }
  const double beta0 = critical_beta(data, o.cfg);
  if (beta < beta0 - o.cfg.eps_geom) {
    throw DomainError("no abelian β-KMS states: beta = " + format_double(beta) + " < beta0 = " + format_double(beta0));
  }
  if (spec->rank() == 0) {
    if (std::abs(beta - beta0) > o.cfg.eps_geom) {
      throw DomainError("no abelian β-KMS states: rank 0 admits them only at beta0 = " + format_double(beta0));
    }
    return KmsState(beta0, {MixtureAtom{1.0, QBetaPoint{Vec(0), beta0}}});
  }
  if (!o.v.empty()) {
    Vec v = parse_vector(o.v);
    if (static_cast<std::size_t>(v.size()) != spec->rank()) throw InputError("--v must have length rank");
    v.normalize();
    const Vec u0 = u_of_beta(data, beta, o.cfg);
    const double t = radial_root(data, beta, u0, v, o.cfg);
    return KmsState(beta, {MixtureAtom{1.0, QBetaPoint{u0 + t * v, beta}}});
  }
  if (std::abs(beta - beta0) <= o.cfg.eps_geom) {
    return KmsState(beta0, {MixtureAtom{1.0, QBetaPoint{u_of_beta(data, beta0, o.cfg), beta0}}});
  }
  throw InputError("beta is above beta0: choose an extreme point with --v, --u-vec or --state");
}

HarmonicVector single_vector(const KmsState& state, const std::shared_ptr<const GroupSpec>& spec) {
  if (state.mixture().size() != 1) throw InputError("this command needs a single extreme state");
  return atom_vector(spec, state.beta(), state.mixture().front());
}

std::string csv_row(const std::vector<double>& xs) {
  std::string row;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) row += ',';
    row += format_double(xs[i]);
  }
  return row;
}

json cone_json(const Fan& fan, ConeId id, const GroupSpec& spec) {
  const Cone& c = fan.cone(id);
  json j;
  j["id"] = id;
  auto z = json::array();
  for (auto s : c.members) z.push_back(spec.symbol(s));
  j["Z"] = z;
  j["dim"] = c.dim;
  auto rays = json::array();
  for (const auto& r : c.rays) rays.push_back(vec_json(r));
  j["rays"] = rays;
  j["center"] = c.dim >= 1 ? vec_json(c.center) : json(nullptr);
  j["faces"] = c.faces;
  return j;
}

int cmd_validate(const Options& o, const GroupSpec& spec, std::ostream& out) {
  const auto report = validate_spec(spec, o.cfg.eps_geom);
  json j;
  j["group"] = spec.name();
  j["valid"] = report.ok();
  j["violations"] = report.violations;
  j["warnings"] = report.warnings;
  out << dump_json(j) << "\n";
  return report.ok() ? kExitOk : kExitDomain;
}

int cmd_critical_beta(const Options& o, const GroupSpec& spec, std::ostream& out) {
  const PartitionData data(spec);
  const double beta0 = critical_beta(data, o.cfg);
  json j;
  j["beta0"] = beta0;
  if (o.check) {
    const double residual = std::abs(min_partition(data, beta0, o.cfg) - 1.0);
    j["residual"] = residual;
    out << dump_json(j) << "\n";
    require_check(residual <= o.cfg.eps_root, "|h(beta0) - 1| = " + format_double(residual));
    return kExitOk;
  }
  out << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_beta_of_u(const Options& o, const GroupSpec& spec, std::ostream& out) {
  const PartitionData data(spec);
  Vec u = o.u_vec.empty() ? Vec::Zero(static_cast<Eigen::Index>(spec.rank())) : parse_vector(o.u_vec);
  if (static_cast<std::size_t>(u.size()) != spec.rank()) throw InputError("--u-vec must have length rank");
  const double beta = beta_of_u(data, u, o.cfg);
  json j;
  j["beta"] = beta;
  const double residual = std::abs(data.weights(u, beta).sum() - 1.0);
  if (o.check) j["residual"] = residual;
  out << dump_json(j) << "\n";
  if (o.check) require_check(residual <= o.cfg.eps_root, "Q identity residual " + format_double(residual));
  return kExitOk;
}

int cmd_q_beta(const Options& o, const GroupSpec& spec, std::ostream& out) {
  const PartitionData data(spec);
  const double beta = resolve_beta(o, data);
  std::vector<QBetaPoint> points;
  std::vector<Vec> directions;
  double beta0 = 0.0;
  std::string kind;
  if (spec.rank() == 0) {
    beta0 = critical_beta(data, o.cfg);
    if (std::abs(beta - beta0) > o.cfg.eps_geom) {
      throw DomainError("no abelian β-KMS states: rank 0 admits them only at beta0 = " + format_double(beta0));
    }
    kind = "critical";
    points.push_back({Vec(0), beta0});
  } else if (!o.v.empty()) {
    beta0 = critical_beta(data, o.cfg);
    Vec v = parse_vector(o.v);
    if (static_cast<std::size_t>(v.size()) != spec.rank()) throw InputError("--v must have length rank");
    v.normalize();
    const Vec u0 = u_of_beta(data, beta, o.cfg);
    const double t = radial_root(data, beta, u0, v, o.cfg);
    kind = "sphere";
    points.push_back({u0 + t * v, beta});
    directions.push_back(v);
  } else {
    auto sample = sample_q_beta(spec, beta, o.K, o.cfg);
    beta0 = sample.beta0;
    if (sample.kind == QBetaCase::Empty) {
      throw DomainError("Q(beta) is empty: beta = " + format_double(beta) + " < beta0 = " + format_double(beta0));
    }
    kind = sample.kind == QBetaCase::Critical ? "critical" : "sphere";
    points = std::move(sample.points);
    directions = std::move(sample.directions);
  }
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, q_beta_residual(data, p));

  if (o.format == "csv") {
    std::string header;
    for (std::size_t i = 0; i < spec.rank(); ++i) header += (i ? ",u" : "u") + std::to_string(i + 1);
    for (std::size_t s = 0; s < spec.size(); ++s) header += (header.empty() ? "p_" : ",p_") + spec.symbol(s);
    header += ",residual";
    out << header << "\n";
    for (const auto& p : points) {
      std::vector<double> row(p.u.data(), p.u.data() + p.u.size());
      for (double x : bernoulli_vector(data, p)) row.push_back(x);
      row.push_back(q_beta_residual(data, p));
      out << csv_row(row) << "\n";
    }
  } else {
    json j;
    j["beta"] = beta;
    j["beta0"] = beta0;
    j["case"] = kind;
    auto arr = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
      json item;
      if (i < directions.size()) item["direction"] = vec_json(directions[i]);
      item["u"] = vec_json(points[i].u);
      item["p"] = bernoulli_vector(data, points[i]);
      arr.push_back(item);
    }
    j["points"] = arr;
    if (o.check) j["max_residual"] = worst;
    out << dump_json(j) << "\n";
  }
  if (o.check) require_check(worst <= o.cfg.eps_root, "Q(beta) residual " + format_double(worst));
  return kExitOk;
}

int cmd_kms_eval(const Options& o, const std::shared_ptr<const GroupSpec>& spec, std::ostream& out) {
  const PartitionData data(*spec);
  const KmsState state = resolve_state(o, spec, data);
  const Word t = spec->parse_word(o.t_word);
  const Word u = spec->parse_word(o.u_word);
  const double value = state_eval(spec, state, t, u);
  json j;
  j["value"] = value;
  if (o.check) {
    double worst = 0.0;
    for (const auto& atom : state.mixture()) {
      if (const auto* q = std::get_if<QBetaPoint>(&atom.extreme)) {
        worst = std::max(worst, q_beta_residual(data, QBetaPoint{q->u, state.beta()}));
      } else {
        worst = std::max(worst, harmonic_residual(atom_vector(spec, state.beta(), atom), 4));
      }
    }
    j["residual"] = worst;
    out << dump_json(j) << "\n";
    require_check(worst <= kHarmonicTol, "state residual " + format_double(worst));
    return kExitOk;
  }
  out << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_harmonic_check(const Options& o, const std::shared_ptr<const GroupSpec>& spec, std::ostream& out) {
  const PartitionData data(*spec);
  const auto psi = single_vector(resolve_state(o, spec, data), spec);
  const double residual = harmonic_residual(psi, o.radius);
  json j;
  j["beta"] = psi.beta();
  j["radius"] = o.radius;
  j["residual"] = residual;
  out << dump_json(j) << "\n";
  if (o.check) require_check(residual <= kHarmonicTol, "harmonic residual " + format_double(residual));
  return kExitOk;
}

int cmd_kms_check(const Options& o, const std::shared_ptr<const GroupSpec>& spec, std::ostream& out) {
  const PartitionData data(*spec);
  const auto psi = single_vector(resolve_state(o, spec, data), spec);
  const double violation = kms_condition_check(psi, o.length);
  json j;
  j["beta"] = psi.beta();
  j["L"] = o.length;
  j["violation"] = violation;
  out << dump_json(j) << "\n";
  if (o.check) require_check(violation <= kHarmonicTol, "KMS condition violation " + format_double(violation));
  return kExitOk;
}

int cmd_fan(const Options& o, const GroupSpec& spec, std::ostream& out) {
  const Fan fan = build_fan(spec, o.cfg);
  json j;
  j["group"] = spec.name();
  j["rank"] = spec.rank();
  j["generators"] = spec.generators();
  auto cones = json::array();
  for (ConeId id = 0; id < fan.cones().size(); ++id) cones.push_back(cone_json(fan, id, spec));
  j["cones"] = cones;
  if (o.check) {
    const double tol = o.cfg.eps_geom * fan.scale();
    bool ok = true;
    for (const auto& c : fan.cones()) {
      if (c.dim < 1) continue;
      ok = ok && cone_slack(c, c.center).inequality < -tol;
      for (const auto& r : c.rays) ok = ok && cone_slack(c, -r).inequality > tol;
    }
    for (const auto& v : sphere_grid(spec.rank(), 10000)) {
      const Cone& c = fan.cone(membership(fan, v));
      const auto slack = cone_slack(c, v);
      ok = ok && slack.inequality <= tol && slack.equality <= tol;
    }
    j["check"] = ok;
    out << dump_json(j) << "\n";
    require_check(ok, "fan convexity, center or covering property");
    return kExitOk;
  }
  out << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_ninf(const Options& o, const GroupSpec& spec, std::ostream& out) {
  const HMap h(spec, o.cfg);
  const PartitionData data(spec);
  std::vector<std::pair<Vec, LimitPoint>> samples;
  if (!o.v.empty()) {
    Vec v = parse_vector(o.v);
    if (static_cast<std::size_t>(v.size()) != spec.rank()) throw InputError("--v must have length rank");
    v.normalize();
    samples.emplace_back(v, h.eval(v));
  } else if (o.grid > 0) {
    samples = n_infinity_sample(h, o.grid);
  } else {
    throw InputError("ninf needs --v or --grid");
  }
  std::vector<double> gaps;
  if (o.check) {
    for (const auto& [v, p] : samples) gaps.push_back(sup_distance(p, associated_limit(h.fan(), data, v, {}, o.cfg)));
  }
  const std::string format = o.format.empty() ? (o.v.empty() ? "csv" : "json") : o.format;
  if (format == "csv") {
    std::string header;
    for (std::size_t i = 0; i < spec.rank(); ++i) header += (i ? ",v" : "v") + std::to_string(i + 1);
    for (std::size_t s = 0; s < spec.size(); ++s) header += ",p_" + spec.symbol(s);
    if (o.check) header += ",oracle_gap";
    out << header << "\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& [v, p] = samples[i];
      std::vector<double> row(v.data(), v.data() + v.size());
      row.insert(row.end(), p.p.begin(), p.p.end());
      if (o.check) row.push_back(gaps[i]);
      out << csv_row(row) << "\n";
    }
  } else {
    auto arr = json::array();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& [v, p] = samples[i];
      json item = to_json(p, spec);
      item["v"] = vec_json(v);
      auto z = json::array();
      for (auto s : h.fan().cone(membership(h.fan(), v)).members) z.push_back(spec.symbol(s));
      item["cone"] = z;
      if (o.check) item["oracle_gap"] = gaps[i];
      arr.push_back(item);
    }
    out << dump_json(samples.size() == 1 && !o.v.empty() ? arr.front() : json{{"points", arr}}) << "\n";
  }
  if (o.check) {
    double worst = 0.0;
    for (double g : gaps) worst = std::max(worst, g);
    require_check(worst <= o.cfg.eps_limit, "H vs associated-sequence oracle gap " + format_double(worst));
  }
  return kExitOk;
}

int cmd_dihedral(const Options& o, const std::shared_ptr<const GroupSpec>& spec, std::ostream& out) {
  if (!o.beta) throw InputError("--beta is required");
  const double t = o.dihedral_t.value_or(1.0);
  const auto psi = HarmonicVector::dihedral(spec, *o.beta, t);
  const auto& d = std::get<DihedralPsi>(psi.data());
  json j;
  j["beta"] = *o.beta;
  j["t"] = t;
  j["c_beta"] = d.c_beta;
  auto xs = json::array();
  auto ys = json::array();
  for (int n = -o.radius; n <= o.radius; ++n) {
    xs.push_back(json{{"n", n}, {"value", psi_eval(psi, GroupElement({n, 0}))}});
    ys.push_back(json{{"n", n}, {"value", psi_eval(psi, GroupElement({n, 1}))}});
  }
  j["x"] = xs;
  j["y"] = ys;
  if (o.check) {
    const double res = harmonic_residual(psi, 8);
    const double kms = kms_condition_check(psi, 5);
    j["harmonic_residual"] = res;
    j["kms_violation"] = kms;
    out << dump_json(j) << "\n";
    require_check(res <= kHarmonicTol && kms <= kHarmonicTol, "dihedral residuals");
    return kExitOk;
  }
  out << dump_json(j) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"KMS states of generalized gauge actions on Cayley-graph algebras", "kms-cayley"};
  app.require_subcommand(1);
  Options o;
  try {
    o.cfg = SolverConfig::from_env();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  auto* validate = app.add_subcommand("validate", "check the group assumptions");
  auto* critical = app.add_subcommand("critical-beta", "critical inverse temperature beta0");
  auto* beta_u = app.add_subcommand("beta-of-u", "beta(u) with sum exp(u.c_s - beta F(s)) = 1");
  auto* qbeta = app.add_subcommand("q-beta", "sample the sphere Q(beta) of extreme abelian states");
  auto* eval = app.add_subcommand("kms-eval", "evaluate a KMS state on V_t V_u*");
  auto* harmonic = app.add_subcommand("harmonic-check", "harmonic residual on a Cayley ball");
  auto* kmscheck = app.add_subcommand("kms-check", "KMS condition over word pairs with equal endpoints");
  auto* fan = app.add_subcommand("fan", "dump the cone fan");
  auto* ninf = app.add_subcommand("ninf", "evaluate H : S^{n-1} -> N_infinity");
  auto* dihedral = app.add_subcommand("dihedral", "the D-infinity family of harmonic vectors");

  for (auto* sub : {validate, critical, beta_u, qbeta, eval, harmonic, kmscheck, fan, ninf, dihedral}) {
    add_common(sub, o);
  }
  beta_u->add_option("--u-vec,--u", o.u_vec, "homomorphism u as x,y,...");
  qbeta->add_option("--beta", o.beta);
  qbeta->add_flag("--beta-critical", o.beta_critical);
  qbeta->add_option("--K", o.K, "number of sphere directions");
  qbeta->add_option("--v", o.v, "single direction instead of the grid");
  for (auto* sub : {eval, harmonic, kmscheck}) add_state_options(sub, o);
  eval->add_option("--t", o.t_word, "word t, e.g. a,b,a_inv");
  eval->add_option("--u", o.u_word, "word u");
  harmonic->add_option("--radius,-R", o.radius);
  kmscheck->add_option("--L", o.length);
  ninf->add_option("--v", o.v, "single direction x,y,...");
  ninf->add_option("--grid", o.grid, "number of sphere grid directions");
  dihedral->add_option("--beta", o.beta);
  dihedral->add_option("--t-param", o.dihedral_t);
  dihedral->add_option("--n-max", o.radius, "print x_n, y_n for |n| <= n-max");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    app.exit(e, msg, msg);
    err << msg.str();
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    o.cfg.validate();
    auto spec = std::make_shared<const GroupSpec>(load_group(o.group));
    if (validate->parsed()) return cmd_validate(o, *spec, out);
    const auto report = validate_spec(*spec, o.cfg.eps_geom);
    if (!report.ok()) throw DomainError("invalid group: " + report.violations.front());
    if (critical->parsed()) return cmd_critical_beta(o, *spec, out);
    if (beta_u->parsed()) return cmd_beta_of_u(o, *spec, out);
    if (qbeta->parsed()) return cmd_q_beta(o, *spec, out);
    if (eval->parsed()) return cmd_kms_eval(o, spec, out);
    if (harmonic->parsed()) return cmd_harmonic_check(o, spec, out);
    if (kmscheck->parsed()) return cmd_kms_check(o, spec, out);
    if (fan->parsed()) return cmd_fan(o, *spec, out);
    if (ninf->parsed()) return cmd_ninf(o, *spec, out);
    if (dihedral->parsed()) return cmd_dihedral(o, spec, out);
  } catch (const CheckFailed& e) {
    err << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kExitDomain;
  } catch (const ConvergenceError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace kms
