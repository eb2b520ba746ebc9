#include "oracles.hpp"

#include "kms_cayley/error.hpp"
#include "kms_cayley/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

using namespace kms;
using doctest::Approx;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

PartitionData z_asym() { return PartitionData({1.0, 2.0}, {vec({1.0}), vec({-1.0})}); }

double partition(const PartitionData& d, const Vec& u, double beta) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    s += std::exp(u.dot(d.cmatrix().row(static_cast<Eigen::Index>(i)).transpose()) - beta * d.potentials()[i]);
  return s;
}

}  // namespace

TEST_CASE("logsumexp is stable") {
  CHECK(logsumexp(vec({1000.0, 1000.0})) == Approx(1000.0 + std::log(2.0)));
  CHECK(logsumexp(vec({-1000.0, -1000.0})) == Approx(-1000.0 + std::log(2.0)));
}

TEST_CASE("solver config") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.eps_root = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  setenv("KMS_CAYLEY_EPS_LIMIT", "2e-7", 1);
  CHECK(SolverConfig::from_env().eps_limit == 2e-7);
  setenv("KMS_CAYLEY_EPS_LIMIT", "abc", 1);
  CHECK_THROWS_AS(SolverConfig::from_env(), InputError);
  unsetenv("KMS_CAYLEY_EPS_LIMIT");
  CHECK(SolverConfig::from_env().eps_limit == 1e-6);
}

TEST_CASE("beta_of_u") {
  SUBCASE("Z^n at u = 0 gives log 2n") {
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto d = PartitionData(builtin_group("zn:" + std::to_string(n)));
      CHECK(beta_of_u(d, Vec::Zero(static_cast<Eigen::Index>(n))) == Approx(std::log(2.0 * n)).epsilon(1e-13));
    }
  }
  SUBCASE("Z with u = c") {
    const auto d = PartitionData(builtin_group("zn:1"));
    for (double c : {0.3, 1.0, 4.0}) CHECK(beta_of_u(d, vec({c})) == Approx(std::log(std::exp(c) + std::exp(-c))).epsilon(1e-13));
  }
  SUBCASE("asymmetric potential, golden ratio") {
    const double beta = beta_of_u(z_asym(), vec({0.0}));
    CHECK(beta == Approx(std::log((1.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-13));
    const double bis = oracle::bisect([](double b) { return std::exp(-b) + std::exp(-2 * b) - 1.0; }, 0.0, 5.0);
    CHECK(beta == Approx(bis).epsilon(1e-13));
  }
  SUBCASE("residual and growth along rays") {
    const auto d = PartitionData(builtin_group("heisenberg"));
    const Vec w = vec({0.6, -0.8});
    double prev = 0.0;
    for (double r : {1.0, 10.0, 100.0}) {
      const double b = beta_of_u(d, r * w);
      CHECK(std::abs(std::log(partition(d, r * w, b))) <= 1e-12);
      CHECK(b > prev);
      prev = b;
    }
  }
}

TEST_CASE("u_of_beta") {
  SUBCASE("symmetric data gives zero") {
    const auto d = PartitionData(builtin_group("heisenberg"));
    for (double b : {0.5, 2.0, 7.0}) CHECK(u_of_beta(d, b).norm() <= 1e-12);
  }
  SUBCASE("asymmetric Z gives -beta/2") {
    for (double b : {0.3, 1.0, 3.0}) CHECK(u_of_beta(z_asym(), b)[0] == Approx(-b / 2.0).epsilon(1e-12));
  }
  SUBCASE("minimality against random probes and finite differences") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    const PartitionData d({1.0, 0.5, 2.0, 1.5}, {vec({1.0, 0.2}), vec({-0.5, 1.0}), vec({-1.0, -1.0}), vec({0.7, -0.4})});
    for (double beta : {0.5, 1.3, 2.9}) {
      const Vec u = u_of_beta(d, beta);
      const double best = partition(d, u, beta);
      CHECK(d.gradient(u, beta).norm() <= 1e-10);
      for (int k = 0; k < 100; ++k) {
        Vec probe = u + 0.5 * Vec::NullaryExpr(2, [&] { return normal(rng); });
        CHECK(partition(d, probe, beta) >= best - 1e-12);
      }
      // Central differences of the partition function at a generic point.
      const Vec x = u + vec({0.3, -0.2});
      const Vec g = d.gradient(x, beta);
      for (Eigen::Index i = 0; i < 2; ++i) {
        Vec e = Vec::Zero(2);
        e[i] = 1e-5;
        const double fd = (partition(d, x + e, beta) - partition(d, x - e, beta)) / 2e-5;
        CHECK(std::abs(fd - g[i]) <= 1e-6 * std::max(1.0, std::abs(g[i])));
      }
    }
  }
  CHECK_THROWS_AS(u_of_beta(PartitionData(builtin_group("dihedral_infinite")), 1.0), UnsupportedError);
}

TEST_CASE("critical_beta") {
  CHECK(critical_beta(PartitionData(builtin_group("heisenberg"))) == Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(critical_beta(PartitionData(builtin_group("dihedral_infinite"))) == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(critical_beta(PartitionData(builtin_group("cyclic:3"))) == Approx(std::log(2.0)).epsilon(1e-12));
  const double b0 = critical_beta(z_asym());
  CHECK(b0 == Approx(2.0 / 3.0 * std::log(2.0)).epsilon(1e-12));
  SUBCASE("grid search over (u, beta)") {
    // h(beta) = min_u (e^{u-beta} + e^{-u-2beta}); bisection on a brute-force minimum.
    auto h = [](double beta) {
      double best = 1e300;
      for (double u = -3.0; u <= 3.0; u += 1e-4) best = std::min(best, std::exp(u - beta) + std::exp(-u - 2 * beta));
      return best;
    };
    CHECK(oracle::bisect([&](double b) { return h(b) - 1.0; }, 0.0, 2.0, 60) == Approx(b0).epsilon(1e-6));
  }
  SUBCASE("sign change on both sides") {
    for (const char* name : {"heisenberg", "zn:2"}) {
      const auto d = PartitionData(builtin_group(name));
      const double c = critical_beta(d);
      CHECK(min_partition(d, c - 0.1) > 1.0);
      CHECK(min_partition(d, c + 0.1) < 1.0);
    }
    const auto d = z_asym();
    CHECK(min_partition(d, b0 - 0.1) > 1.0);
    CHECK(min_partition(d, b0 + 0.1) < 1.0);
  }
}

TEST_CASE("radial_root") {
  SUBCASE("Z at log 5/2") {
    const auto d = PartitionData(builtin_group("zn:1"));
    CHECK(radial_root(d, std::log(2.5), vec({1.0})) == Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(radial_root(d, std::log(2.5), vec({-1.0})) == Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("Heisenberg at beta = 2") {
    const auto d = PartitionData(builtin_group("heisenberg"));
    const double e2 = std::exp(2.0);
    const double t = radial_root(d, 2.0, vec({1.0, 0.0}));
    // e^{t-2} + e^{-t-2} + 4e^{-2} = 1, i.e. 2 cosh t = e^2 - 4.
    CHECK(t == Approx(std::acosh((e2 - 4.0) / 2.0)).epsilon(1e-12));
    const double bis = oracle::bisect(
        [](double x) { return std::exp(-2.0) * (std::exp(x) + std::exp(-x)) + 4 * std::exp(-2.0) - 1.0; }, 0.0, 5.0);
    CHECK(t == Approx(bis).epsilon(1e-12));
  }
  SUBCASE("Q membership and symmetry") {
    const auto d = PartitionData(builtin_group("heisenberg"));
    for (const auto& v : sphere_grid(2, 16)) {
      const double t = radial_root(d, 2.5, v);
      CHECK(std::abs(partition(d, t * v, 2.5) - 1.0) <= 1e-12);
      CHECK(t == Approx(radial_root(d, 2.5, Vec(-v))).epsilon(1e-12));
    }
  }
  SUBCASE("domain errors") {
    const auto d = PartitionData(builtin_group("heisenberg"));
    CHECK_THROWS_AS(radial_root(d, 1.0, vec({1.0, 0.0})), DomainError);
    CHECK_THROWS_AS(radial_root(d, std::log(6.0), vec({1.0, 0.0})), DomainError);
    CHECK_THROWS_AS(radial_root(d, 2.0, vec({2.0, 0.0})), InputError);
  }
}

TEST_CASE("power_sum_root") {
  std::vector<double> ones{1.0, 1.0};
  std::vector<double> unit{1.0, 1.0};
  CHECK(power_sum_root(ones, unit) == Approx(0.5).epsilon(1e-14));
  CHECK(power_sum_root(std::vector<double>{1.0, 0.0}, unit) == Approx(1.0).epsilon(1e-14));
  CHECK(power_sum_root(std::vector<double>{1.0, 2.0 - std::sqrt(2.0)}, unit) ==
        Approx(1.0 / (3.0 - std::sqrt(2.0))).epsilon(1e-14));
  CHECK(power_sum_root(ones, std::vector<double>{1.0, 2.0}) == Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(power_sum_root(std::vector<double>{0.0, 0.0}, unit), InputError);
}

TEST_CASE("sphere grids are unit and deterministic") {
  for (std::size_t n : {1, 2, 3, 4}) {
    const auto a = sphere_grid(n, 50);
    const auto b = sphere_grid(n, 50);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i].norm() - 1.0) <= 1e-14);
      CHECK((a[i] - b[i]).norm() == 0.0);
    }
  }
  CHECK(sphere_grid(1, 99).size() == 2);
  const auto q = quasi_random_directions(2, 200);
  CHECK(q.size() == 200);
}

TEST_CASE("solvers are bit-reproducible") {
  const auto d = PartitionData(builtin_group("heisenberg"));
  const Vec v = vec({0.6, 0.8});
  CHECK(radial_root(d, 2.2, v) == radial_root(d, 2.2, v));
  CHECK(critical_beta(d) == critical_beta(d));
  CHECK(beta_of_u(d, v) == beta_of_u(d, v));
}
