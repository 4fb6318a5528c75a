#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "drainage/analytic_laws.hpp"
#include "drainage/clt_harness.hpp"

using namespace drainage;

TEST_CASE("run_replicas: determinism, validation, mean consistency") {
  ModelParams params(2, 0.5);
  auto a = run_replicas(params, 48, StatKind::kDegreeCount, 1, 120, 42);
  auto b = run_replicas(params, 48, StatKind::kDegreeCount, 1, 120, 42);
  CHECK(a.values == b.values);
  for (double v : a.values) CHECK(v >= 0.0);

  CHECK_THROWS_AS(run_replicas(params, 48, StatKind::kDegreeCount, 1, 99, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_replicas(params, 48, StatKind::kDegreeCount, -1, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_replicas(params, 48, StatKind::kEdgeLengthCount, 0, 100, 1),
                  std::invalid_argument);

  // per-site frequency of degree nu+1 vertices matches p * pmf[nu+1]
  double sites = 48.0 * 48.0;
  std::vector<double> freqs;
  for (double v : a.values) freqs.push_back(v / sites);
  auto m = mean_with_error(freqs);
  double expect = params.p * degree_pmf(params.p).pmf[2];
  CHECK(std::abs(m.mean - expect) <= 3 * m.std_error);
}

TEST_CASE("replica variance scales like the window volume") {
  ModelParams params(2, 0.5);
  auto s64 = run_replicas(params, 64, StatKind::kDegreeCount, 1, 300, 7);
  auto s128 = run_replicas(params, 128, StatKind::kDegreeCount, 1, 300, 8);
  double v64 = sample_moments(s64.values).variance;
  double v128 = sample_moments(s128.values).variance;
  double ratio = v128 / v64;
  MESSAGE("variance ratio n=128 over n=64: ", ratio);
  CHECK(ratio >= 4.0 * 0.7);
  CHECK(ratio <= 4.0 * 1.3);
}

namespace {

ReplicaSample synthetic_sample(std::vector<double> values) {
  ReplicaSample rs;
  rs.params = ModelParams(2, 0.5);
  rs.n = 1;
  rs.values = std::move(values);
  return rs;
}

}  // namespace

TEST_CASE("normality report on synthetic samples") {
  std::mt19937_64 gen(2718);
  std::normal_distribution<double> gauss(5.0, 3.0);
  std::exponential_distribution<double> expo(1.0);

  std::vector<double> normal_draws, expo_draws;
  for (int i = 0; i < 10000; ++i) {
    normal_draws.push_back(gauss(gen));
    expo_draws.push_back(expo(gen));
  }

  auto good = normality_report(synthetic_sample(normal_draws));
  CHECK(good.has_verdict);
  CHECK(good.normal_verdict);
  auto moments = sample_moments(good.standardized);
  CHECK(std::abs(moments.mean) < 1e-9);
  CHECK(std::abs(moments.variance - 1.0) < 1e-9);

  auto bad = normality_report(synthetic_sample(expo_draws));
  CHECK(!bad.ks_ok);
  CHECK(!bad.normal_verdict);

  CHECK_THROWS_AS(normality_report(synthetic_sample(std::vector<double>(100, 3.0))),
                  DegenerateSample);

  auto small = normality_report(synthetic_sample(
      std::vector<double>(normal_draws.begin(), normal_draws.begin() + 200)));
  CHECK(!small.has_verdict);
  CHECK(!small.normal_verdict);
}

TEST_CASE("window degree counts look normal at desk scale") {
  ModelParams params(2, 0.5);
  auto sample = run_replicas(params, 64, StatKind::kDegreeCount, 1, 600, 99);
  auto rep = normality_report(sample);
  CHECK(rep.has_verdict);
  MESSAGE("S_n standardized: skew ", rep.skewness, " kurt ", rep.excess_kurtosis, " ks ",
          rep.ks_distance);
  CHECK(std::abs(rep.skewness) < 0.3);
  CHECK(std::abs(rep.excess_kurtosis) < 0.6);
  CHECK(rep.ks_distance < 0.05);
  CHECK(rep.fitted_scale == doctest::Approx(std::sqrt(rep.variance) / 64.0));
}

TEST_CASE("limit variance: truncation stability and consistency with replica variance") {
  ModelParams params(2, 0.5);
  // same replica seeds: the difference is exactly the lag-21..40 contribution
  auto s20 = estimate_s2(params, 256, 1, 20, 150, 11);
  auto s40 = estimate_s2(params, 256, 1, 40, 150, 11);
  double joint = std::sqrt(s20.total.std_error * s20.total.std_error +
                           s40.total.std_error * s40.total.std_error);
  CHECK(std::abs(s20.total.mean - s40.total.mean) <= 3 * joint);
  CHECK(s20.total.mean > 0.0);
  CHECK(s20.var_term > 0.0);
  CHECK(s20.lag_cap == 20);

  auto sample = run_replicas(params, 128, StatKind::kDegreeCount, 1, 400, 13);
  double var = sample_moments(sample.values).variance;
  double per_site = var / (128.0 * 128.0);
  // variance-of-variance standard error ~ var * sqrt(2 / R)
  double se = per_site * std::sqrt(2.0 / 400.0);
  double joint2 = std::sqrt(se * se + s20.total.std_error * s20.total.std_error);
  MESSAGE("replica Var(S_n)/n^2: ", per_site, "  four-term s^2: ", s20.total.mean);
  CHECK(std::abs(per_site - s20.total.mean) <= 3 * joint2 + 0.01);

  CHECK_THROWS_AS(estimate_s2(params, 256, 1, 0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_s2(params, 16, 1, 20, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_s2(ModelParams(3, 0.5), 256, 1, 20, 10, 1), std::invalid_argument);
}

TEST_CASE("dependence structure of the degree indicator field") {
  ModelParams params(2, 0.5);
  auto table = dependence_diagnostics(params, 1, {1, 2, 3, 5, 8, 32}, 600, 21);

  double q = params.p * degree_pmf(params.p).pmf[2];
  CHECK(std::abs(table.lag0_variance.mean - q * (1.0 - q)) <= 3 * table.lag0_variance.std_error);

  for (const auto& e : table.entries) {
    if (e.lag >= 2) CHECK(std::abs(e.vertical.mean) <= 3 * e.vertical.std_error);
    if (e.lag == 1) CHECK(std::abs(e.vertical.mean) > 3 * e.vertical.std_error);
    if (e.lag == 32) CHECK(std::abs(e.horizontal.mean) <= 3 * e.horizontal.std_error);
  }
  // horizontal dependence is measurable at lag 1 and fades
  CHECK(std::abs(table.entries[0].horizontal.mean) > 3 * table.entries[0].horizontal.std_error);
  CHECK(std::abs(table.entries[0].horizontal.mean) >
        std::abs(table.entries[5].horizontal.mean));

  CHECK_THROWS_AS(dependence_diagnostics(params, 1, {0}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(dependence_diagnostics(params, 1, {65}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(dependence_diagnostics(ModelParams(4, 0.5), 1, {2}, 10, 1),
                  std::invalid_argument);
}
