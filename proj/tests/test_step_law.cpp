#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "drainage/stats.hpp"
#include "drainage/step_law.hpp"

using namespace drainage;

namespace {

// Brute-force point count oracle, independent of the closed-form route.
std::uint64_t count_diamond_brute(int m, std::int64_t k) {
  std::uint64_t n = 0;
  for_each_diamond_point(m, k, [&](const LatticePoint&) { ++n; });
  return n;
}

}  // namespace

TEST_CASE("diamond and shell cardinalities") {
  CHECK(diamond_size(2, 1) == 5);
  CHECK(diamond_size(1, 3) == 7);
  CHECK(diamond_size(3, 2) == 25);
  CHECK(shell_size(2, 2) == 8);
  CHECK(shell_size(1, 5) == 2);
  CHECK(shell_size(3, 2) == 18);
  CHECK(diamond_size(3, 2) - diamond_size(3, 1) == 18);

  // m = 2 closed forms
  for (std::int64_t k = 0; k <= 100; ++k) {
    CHECK(diamond_size(2, k) == static_cast<std::uint64_t>(1 + 2 * k * (k + 1)));
    if (k >= 1) CHECK(shell_size(2, k) == static_cast<std::uint64_t>(4 * k));
  }

  // consistency: diamond = previous diamond + shell, all m <= 4
  for (int m = 1; m <= 4; ++m)
    for (std::int64_t k = 1; k <= 100; ++k)
      CHECK(diamond_size(m, k) == diamond_size(m, k - 1) + shell_size(m, k));

  // enumeration oracle at small radius
  for (int m = 1; m <= 4; ++m)
    for (std::int64_t k = 0; k <= 6; ++k)
      CHECK(diamond_size(m, k) == count_diamond_brute(m, k));

  // m = 3 growth: (1/2)k^3 <= #Delta_k for all k, and #Delta_k <= 2k^3 once
  // the cubic term dominates (volume is (4/3)k^3 + 2k^2 + (8/3)k + 1)
  for (std::int64_t k = 1; k <= 50; ++k) {
    double vol = static_cast<double>(diamond_size(3, k));
    double k3 = static_cast<double>(k * k * k);
    CHECK(vol >= 0.5 * k3);
    if (k >= 8) CHECK(vol <= 2.0 * k3);
  }

  // overflow safety at large radius
  CHECK(diamond_size(4, 10000) > diamond_size(4, 9999));
}

TEST_CASE("shell probabilities") {
  StepLaw law(ModelParams(2, 0.5));
  CHECK(law.shell_probability(0) == doctest::Approx(0.5));
  // (1-p)^{#D_0} (1 - (1-p)^{#dD_1}) = 0.5 * (1 - 0.25)
  CHECK(law.shell_probability(1) == doctest::Approx(0.375).epsilon(1e-12));

  for (int d = 2; d <= 4; ++d) {
    for (double p : {0.3, 0.5, 0.7}) {
      StepLaw l{ModelParams(d, p)};
      CHECK(l.shell_probability(0) == doctest::Approx(p));
      double total = 0.0;
      for (int k = 0; k <= l.k_max(); ++k) {
        CHECK(l.shell_probability(k) >= 0.0);
        total += l.shell_probability(k);
      }
      CHECK(l.tail_mass() <= 1e-12);
      CHECK(total + l.tail_mass() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS((void)StepLaw(ModelParams(2, 0.5)).shell_probability(10000), std::out_of_range);
  CHECK_THROWS_AS(ModelParams(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(1, 0.5), std::invalid_argument);
}

TEST_CASE("per-site mass is symmetric across each shell") {
  StepLaw law(ModelParams(4, 0.4));
  for (int k = 1; k <= 3; ++k) {
    double expect = law.site_probability(k);
    for (const auto& u : law.shell_points(k)) CHECK(law.probability_of(u) == doctest::Approx(expect));
    // permutation / sign-flip invariance is structural: every point of the
    // shell carries the same mass, including all images under the symmetry group
    LatticePoint a{static_cast<std::int64_t>(k), 0, 0};
    LatticePoint b{0, 0, static_cast<std::int64_t>(-k)};
    CHECK(law.probability_of(a) == doctest::Approx(law.probability_of(b)));
  }
}

TEST_CASE("sampler determinism and distribution") {
  StepLaw law(ModelParams(3, 0.5));
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(law.sample(a) == law.sample(b));

  const int n = 1000000;
  RngStream rng(7);
  std::vector<double> observed(static_cast<std::size_t>(law.k_max()) + 1, 0.0);
  double sum1 = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    LatticePoint u = law.sample(rng);
    observed[static_cast<std::size_t>(u.l1())] += 1.0;
    sum1 += static_cast<double>(u[0]);
    sum2 += static_cast<double>(u[1]);
  }
  std::vector<double> expected;
  for (int k = 0; k <= law.k_max(); ++k) expected.push_back(law.shell_probability(k) * n);
  auto gof = chi_square_gof(observed, expected);
  CHECK(gof.p_value > 0.001);

  // empirical mean within 4 standard errors of zero (odd moments vanish)
  double m2 = step_moment(law.params(), 2);
  double se = std::sqrt(m2 / n);
  CHECK(std::abs(sum1 / n) < 4 * se);
  CHECK(std::abs(sum2 / n) < 4 * se);
}

TEST_CASE("moments") {
  ModelParams params(3, 0.5);
  CHECK(step_moment(params, 1) == 0.0);
  CHECK(step_moment(params, 3) == 0.0);
  CHECK(step_moment(params, 2, 1) == 0.0);
  CHECK(step_moment(params, 0) == doctest::Approx(1.0).epsilon(1e-10));

  // independent brute-force double sum over D_50
  double q = 1.0 - params.p;
  double brute = 0.0;
  for (std::int64_t k = 1; k <= 50; ++k) {
    double per_site = std::pow(q, static_cast<double>(diamond_size(2, k - 1))) *
                      (1.0 - std::pow(q, static_cast<double>(shell_size(2, k)))) /
                      static_cast<double>(shell_size(2, k));
    for_each_shell_point(2, k, [&](const LatticePoint& u) {
      brute += static_cast<double>(u[0]) * static_cast<double>(u[0]) * per_site;
    });
  }
  CHECK(step_moment(params, 2) == doctest::Approx(brute).epsilon(1e-10));

  // tolerance robustness
  CHECK(step_moment(params, 2, 0, 1e-8) == doctest::Approx(step_moment(params, 2, 0, 1e-12)).epsilon(1e-8));

  // m_{2,2} positive and finite
  double m22 = step_moment(params, 2, 2);
  CHECK(m22 > 0.0);
  CHECK(std::isfinite(m22));
}
