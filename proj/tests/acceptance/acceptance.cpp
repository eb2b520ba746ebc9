// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only (exit status 0 iff it passes)

#include "kms_cayley/cli.hpp"
#include "kms_cayley/cone_fan.hpp"
#include "kms_cayley/error.hpp"
#include "kms_cayley/io.hpp"
#include "kms_cayley/kms.hpp"
#include "kms_cayley/n_infinity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kms;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;  // informational lines, never affect the verdict
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::shared_ptr<const GroupSpec> group(const std::string& name) {
  return std::make_shared<const GroupSpec>(builtin_group(name));
}

GroupSpec z2_weighted() {
  return group_from_json(R"({"name": "z2 F(e1)=1 F(e2)=2", "generators": ["e1", "e1_inv", "e2", "e2_inv"],
    "rank": 2, "oracle": "free_abelian", "F": {"e1": 1, "e1_inv": 1, "e2": 2, "e2_inv": 2},
    "c": {"e1": [1, 0], "e1_inv": [-1, 0], "e2": [0, 1], "e2_inv": [0, -1]}})");
}

struct CliResult {
  int code;
  std::string out;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kms-cayley");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

bool close_rel(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(x)); }

// 1. Heisenberg critical temperature.
Outcome criterion1() {
  const auto start = Clock::now();
  const auto r = cli({"critical-beta", "--group", "heisenberg"});
  const double elapsed = seconds_since(start);
  const double beta0 = nlohmann::json::parse(r.out).at("beta0").get<double>();
  const double err = std::abs(beta0 - std::log(6.0));
  return {r.code == 0 && err <= 1e-9 && elapsed < 1.0,
          "beta0 = " + format_double(beta0) + ", |beta0 - log 6| = " + fmt(err) + ", " + fmt(elapsed) + " s"};
}

// 2. Heisenberg uniqueness at beta0 and emptiness below.
Outcome criterion2() {
  const auto h = builtin_group("heisenberg");
  const auto at = sample_q_beta(h, std::log(6.0), 64);
  const auto below = sample_q_beta(h, 1.7, 64);
  const double unorm = at.points.empty() ? INFINITY : at.points.front().u.norm();
  const bool ok = at.kind == QBetaCase::Critical && at.points.size() == 1 && unorm <= 1e-9 &&
                  below.kind == QBetaCase::Empty && below.points.empty();
  return {ok, "log 6: " + std::to_string(at.points.size()) + " point(s), |u| = " + fmt(unorm) +
                  "; beta = 1.7: " + std::to_string(below.points.size()) + " point(s)"};
}

// 3. D-infinity rank-0 path.
Outcome criterion3() {
  const auto d = group("dihedral_infinite");
  const double beta0 = critical_beta(PartitionData(*d));
  const double err = std::abs(beta0 - std::log(2.0));
  const auto psi = HarmonicVector::exponential(d, beta0, Vec(0));
  double worst = 0.0;
  std::size_t words = 0;
  for (std::size_t len = 0; len <= 6; ++len) {
    for_each_word(d->size(), len, [&](const Word& t) {
      worst = std::max(worst, std::abs(cylinder_mass(psi, t) - std::ldexp(1.0, -static_cast<int>(len))));
      ++words;
    });
  }
  return {err <= 1e-9 && worst <= 1e-12, "beta0 = " + format_double(beta0) + ", |beta0 - log 2| = " + fmt(err) +
                                             "; max |m(t) - 2^-|t|| = " + fmt(worst) + " over " +
                                             std::to_string(words) + " words"};
}

// 4. D-infinity non-abelian family.
Outcome criterion4() {
  const auto d = group("dihedral_infinite");
  const double beta = std::log(2.5);
  const double cerr = std::abs(dihedral_c_beta(beta) - std::log(2.0));
  double harm = 0.0, kmsv = 0.0;
  for (double t : {0.0, 0.25, 0.5, 1.0}) {
    const auto psi = HarmonicVector::dihedral(d, beta, t);
    harm = std::max(harm, harmonic_residual(psi, 8));
    kmsv = std::max(kmsv, kms_condition_check(psi, 5));
  }
  return {cerr <= 1e-12 && harm <= 1e-10 && kmsv <= 1e-10,
          "|c(beta) - log 2| = " + fmt(cerr) + ", max harmonic residual = " + fmt(harm) +
              ", max KMS violation = " + fmt(kmsv)};
}

// 5. Q(beta) sphere identity.
Outcome criterion5() {
  const auto h = builtin_group("heisenberg");
  const PartitionData data(h);
  double worst = 0.0;
  std::size_t points = 0;
  bool sphere = true;
  for (double beta : {2.0, 2.5, 3.0}) {
    const auto s = sample_q_beta(h, beta, 64);
    sphere = sphere && s.kind == QBetaCase::Sphere && s.points.size() == 64;
    for (const auto& p : s.points) worst = std::max(worst, q_beta_residual(data, p));
    points += s.points.size();
  }
  return {sphere && worst <= 1e-12, "max residual = " + fmt(worst) + " over " + std::to_string(points) + " points"};
}

// 6. Convex-minimizer correctness on random instances.
Outcome criterion6() {
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::vector<std::string> builtins = {"heisenberg", "zn:1", "zn:2", "zn:3"};
  double worst_grad = 0.0, worst_fd = 0.0;
  int instances = 0;
  while (instances < 20) {
    std::vector<double> F;
    std::vector<Vec> c;
    if (instances < static_cast<int>(builtins.size())) {
      const auto spec = builtin_group(builtins[static_cast<std::size_t>(instances)]);
      F = spec.potentials();
      c = spec.cvecs();
    } else {
      const Eigen::Index n = 1 + static_cast<Eigen::Index>(instances % 3);
      const std::size_t m = static_cast<std::size_t>(n) + 2 + static_cast<std::size_t>(instances % 3);
      for (std::size_t s = 0; s < m; ++s) {
        F.push_back(0.25 + 2.0 * uniform(rng));
        c.push_back(Vec::NullaryExpr(n, [&] { return normal(rng); }));
      }
      GroupSpecData d;
      d.name = "random";
      d.rank = static_cast<std::size_t>(n);
      d.potential = F;
      d.cvec = c;
      for (std::size_t s = 0; s < m; ++s) d.generators.push_back("s" + std::to_string(s));
      if (!validate_spec(GroupSpec(d)).ok()) continue;  // only positively spanning data
    }
    const PartitionData data(F, c);
    const double beta = 0.5 + 3.5 * uniform(rng);
    const Vec u = u_of_beta(data, beta);
    worst_grad = std::max(worst_grad, data.gradient(u, beta).norm());
    // Central differences at a displaced point, where the gradient is not zero.
    const Vec x = u + 0.3 * Vec::NullaryExpr(u.size(), [&] { return normal(rng); });
    const Vec g = data.gradient(x, beta);
    Vec fd(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vec e = Vec::Zero(x.size());
      e[i] = 1e-5;
      fd[i] = (data.weights(x + e, beta).sum() - data.weights(x - e, beta).sum()) / 2e-5;
    }
    worst_fd = std::max(worst_fd, (fd - g).norm() / std::max(1.0, g.norm()));
    ++instances;
  }
  return {worst_grad <= 1e-10 && worst_fd <= 1e-6,
          "20 instances: max |grad at u(beta)| = " + fmt(worst_grad) + ", max relative FD gap = " + fmt(worst_fd)};
}

// 7. Harmonicity and consistency over words of length <= 5.
Outcome criterion7() {
  const auto start = Clock::now();
  struct Case {
    std::shared_ptr<const GroupSpec> spec;
    HarmonicVector psi;
  };
  std::vector<Case> cases;
  for (const char* name : {"heisenberg", "dihedral_infinite", "zn:1", "zn:2", "zn:3", "cyclic:3"}) {
    const auto spec = group(name);
    const PartitionData data(*spec);
    const double beta0 = critical_beta(data);
    if (spec->rank() == 0) {
      cases.push_back({spec, HarmonicVector::exponential(spec, beta0, Vec(0))});
    } else {
      cases.push_back({spec, HarmonicVector::exponential(spec, beta0, u_of_beta(data, beta0))});
      for (const auto& p : sample_q_beta(*spec, beta0 + 0.5, 4).points) {
        cases.push_back({spec, HarmonicVector::exponential(spec, p.beta, p.u)});
      }
    }
    if (spec->oracle() == OracleKind::DihedralInfinite) {
      for (double t : {0.0, 0.5, 1.0}) cases.push_back({spec, HarmonicVector::dihedral(spec, std::log(2.5), t)});
    }
  }
  double kolmogorov = 0.0, representative = 0.0;
  for (const auto& c : cases) {
    const auto& spec = *c.spec;
    std::map<GroupElement, double> rep;
    for (std::size_t len = 0; len <= 5; ++len) {
      for_each_word(spec.size(), len, [&](const Word& t) {
        const double m = cylinder_mass(c.psi, t);
        double children = 0.0;
        for (std::size_t s = 0; s < spec.size(); ++s) children += cylinder_mass(c.psi, concat(t, Word{{s}}));
        kolmogorov = std::max(kolmogorov, std::abs(children - m) / std::max(1.0, m));
        const double scaled = std::exp(c.psi.beta() * spec.word_potential(t)) * m;
        auto [it, fresh] = rep.emplace(spec.endpoint(t), scaled);
        if (!fresh) representative = std::max(representative, std::abs(it->second - scaled) / std::max(1.0, scaled));
      });
    }
  }
  const double elapsed = seconds_since(start);
  return {kolmogorov <= 1e-12 && representative <= 1e-12 && elapsed < 30.0,
          std::to_string(cases.size()) + " states: max Kolmogorov gap = " + fmt(kolmogorov) +
              ", max representative gap = " + fmt(representative) + ", " + fmt(elapsed) + " s"};
}

// 8. H against the plain ray-limit oracle.
Outcome criterion8() {
  const auto start = Clock::now();
  double worst = 0.0, worst_assoc = 0.0, worst_center = 0.0;
  std::size_t failing = 0, total = 0, unconverged = 0;
  std::vector<std::string> notes;
  for (const auto& spec : {builtin_group("heisenberg"), z2_weighted()}) {
    const HMap h(spec);
    const PartitionData data(spec);
    double spec_worst = 0.0;
    for (const auto& v : quasi_random_directions(spec.rank(), 200)) {
      const LimitPoint hv = h.eval(v);
      // A direction whose ray does not settle counts as a failure; its last iterate is compared.
      const auto trace = ray_limit_trace(data, v, Vec::Zero(v.size()), RaySchedule{});
      const LimitPoint& ray = trace.point;
      unconverged += !trace.converged;
      const double gap = sup_distance(hv, ray);
      spec_worst = std::max(spec_worst, gap);
      failing += gap > 1e-6 || !trace.converged;
      ++total;
      worst_assoc = std::max(worst_assoc, sup_distance(hv, associated_limit(h.fan(), data, v)));
      if (trace.converged)
        worst_center = std::max(worst_center, sup_distance(ray, h.center_value(membership(h.fan(), v))));
    }
    notes.push_back(spec.name() + ": max |H(v) - ray_limit(v)| = " + fmt(spec_worst));
    worst = std::max(worst, spec_worst);
  }
  const double elapsed = seconds_since(start);
  notes.push_back("the plain ray limit equals H at the center of the cone containing v (max gap " + fmt(worst_center) +
                  "), so it is constant on cone interiors while H is not");
  notes.push_back(std::to_string(unconverged) + " ray(s) did not settle within the radius schedule");
  notes.push_back("H against the shifted-ray oracle r*d - sum log(lambda_k) c_k: max gap " + fmt(worst_assoc));
  return {failing == 0 && elapsed < 60.0,
          std::to_string(failing) + " of " + std::to_string(total) + " directions exceed 1e-6, max gap = " +
              fmt(worst) + ", " + fmt(elapsed) + " s",
          notes};
}

// 9. Worked instance of the recursive formula.
Outcome criterion9() {
  const auto spec = builtin_group("heisenberg");
  const HMap h(spec);
  const double r2 = std::sqrt(2.0);
  const std::vector<double> expected = {1.0 / (3.0 - r2), 0.0, (2.0 - r2) / (3.0 - r2), 0.0, 0.0, 0.0};
  Vec v(2);
  v << 2.0, 1.0;
  v.normalize();
  const LimitPoint got = h.eval(v);
  double err = 0.0;
  for (std::size_t s = 0; s < expected.size(); ++s) err = std::max(err, std::abs(got.p[s] - expected[s]));
  const double oracle_gap = sup_distance(LimitPoint::from_probabilities(expected), associated_limit(h.fan(), PartitionData(spec), v));
  return {err <= 1e-9, "H((2,1)/sqrt5) = (" + format_double(got.p[0]) + ", " + format_double(got.p[2]) +
                           ") on (a, b), max error = " + fmt(err),
          {"shifted-ray oracle distance from the frozen value: " + fmt(oracle_gap)}};
}

// 10. N-infinity sphere-image properties.
Outcome criterion10() {
  double worst_norm = 0.0, min_sep = INFINITY;
  bool continuity = true, support = true;
  std::string moduli;
  for (const auto& spec : {builtin_group("heisenberg"), z2_weighted()}) {
    const HMap h(spec);
    const auto& F = h.potentials();
    const auto sample = n_infinity_sample(h, 360);
    for (const auto& [v, t] : sample) {
      worst_norm = std::max(worst_norm, std::abs(t.sum() - 1.0));
      const Cone& cone = h.fan().cone(membership(h.fan(), v));
      double top = 0.0;
      for (std::size_t s = 0; s < F.size(); ++s) top = std::max(top, std::pow(t.p[s], 1.0 / F[s]));
      for (auto z : cone.members) {
        support = support && t.p[z] > 0.0 && std::abs(std::pow(t.p[z], 1.0 / F[z]) - top) <= 1e-9 * std::max(1.0, top);
      }
    }
    for (std::size_t i = 0; i < sample.size(); ++i) {
      for (std::size_t j = i + 1; j < sample.size(); ++j) {
        if ((sample[i].first - sample[j].first).norm() < 0.05) continue;
        min_sep = std::min(min_sep, sup_distance(sample[i].second, sample[j].second));
      }
    }
    double prev = INFINITY;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
      double modulus = 0.0;
      for (const auto& [v, t] : sample) {
        const double theta = std::atan2(v[1], v[0]) + delta;
        Vec w(2);
        w << std::cos(theta), std::sin(theta);
        modulus = std::max(modulus, sup_distance(t, h.eval(w)));
      }
      continuity = continuity && modulus < prev;
      moduli += (moduli.empty() ? "" : ", ") + fmt(modulus);
      prev = modulus;
    }
  }
  return {worst_norm <= 1e-12 && min_sep > 0.0 && continuity && support,
          "max |sum p - 1| = " + fmt(worst_norm) + ", min separation = " + fmt(min_sep) + ", moduli (" + moduli +
              "), support law " + (support ? "holds" : "violated")};
}

// 11. Fan sanity on built-ins.
Outcome criterion11() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"zn:1", "zn:2", "zn:3", "heisenberg"}) {
    const auto spec = builtin_group(name);
    const Fan fan = build_fan(spec);
    const double tol = fan.eps_geom() * fan.scale();
    std::vector<ConeId> maximal;
    for (ConeId id = 0; id < fan.cones().size(); ++id) {
      const Cone& c = fan.cone(id);
      if (c.dim == static_cast<int>(spec.rank())) maximal.push_back(id);
      if (c.dim == 0) continue;
      ok = ok && cone_slack(c, c.center).inequality < -tol;
      for (const auto& r : c.rays) {
        const auto neg = cone_slack(c, -r);
        ok = ok && (neg.inequality > tol || neg.equality > tol);
      }
    }
    std::size_t interior = 0, boundary = 0, bad = 0;
    for (const auto& v : sphere_grid(spec.rank(), 10000)) {
      std::size_t claims = 0;
      for (ConeId id : maximal) claims += cone_slack(fan.cone(id), v).inequality < -tol;
      if (claims == 1) {
        ++interior;
        continue;
      }
      // Otherwise v must lie within eps_geom of a lower-dimensional face.
      const Cone& c = fan.cone(membership(fan, v));
      const auto slack = cone_slack(c, v);
      if (claims == 0 && c.dim < static_cast<int>(spec.rank()) && slack.inequality <= tol && slack.equality <= tol) {
        ++boundary;
      } else {
        ++bad;
      }
    }
    ok = ok && bad == 0;
    detail += std::string(detail.empty() ? "" : "; ") + name + ": " + std::to_string(interior) + " interior, " +
              std::to_string(boundary) + " boundary, " + std::to_string(bad) + " unclaimed";
  }
  return {ok, detail + (ok ? "; convexity and centers ok" : "")};
}

// 12. Negative controls.
Outcome criterion12() {
  const auto h = group("heisenberg");
  TabulatedPsi table;
  const Ball b = ball(*h, 6);
  for (std::size_t i = 0; i < b.elements.size(); ++i) {
    table.values.emplace(b.elements[i], 1.0);
    for (const auto& n : b.neighbors[i]) table.values.emplace(n, 1.0);
  }
  table.values[h->generator_element(0)] = 1.1;
  const double violation = kms_condition_check(HarmonicVector::tabulated(h, std::log(6.0), table), 4);
  const int q_code = cli({"q-beta", "--group", "heisenberg", "--beta", "1.7"}).code;
  const int eval_code = cli({"kms-eval", "--group", "heisenberg", "--beta", "1.7", "--t", "a", "--u", "a"}).code;
  return {violation > 1e-2 && q_code == 2 && eval_code == 2,
          "perturbed psi violation = " + fmt(violation) + "; q-beta below beta0 exit " + std::to_string(q_code) +
              ", kms-eval below beta0 exit " + std::to_string(eval_code)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> all = {
      {"Heisenberg critical temperature", criterion1},
      {"Heisenberg uniqueness at beta0", criterion2},
      {"D-infinity rank-0 path", criterion3},
      {"D-infinity non-abelian family", criterion4},
      {"Q(beta) sphere identity", criterion5},
      {"convex minimizer", criterion6},
      {"harmonicity and consistency", criterion7},
      {"H vs ray-limit oracle", criterion8},
      {"worked recursive instance", criterion9},
      {"N-infinity sphere image", criterion10},
      {"fan sanity", criterion11},
      {"negative controls", criterion12},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (only != 0 && number != only) continue;
    const auto& [name, run] = criteria()[i];
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  criterion " << number << " (" << name << "): " << outcome.detail
              << "\n";
    for (const auto& note : outcome.notes) std::cout << "      note: " << note << "\n";
    failures += !outcome.pass;
  }
  return failures == 0 ? 0 : 1;
}
