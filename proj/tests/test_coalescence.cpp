#include "doctest.h"

#include <cmath>

#include "drainage/coalescence.hpp"
#include "drainage/step_law.hpp"

using namespace drainage;

TEST_CASE("simulate_pair basics") {
  ModelParams params(2, 0.5);
  SpacePoint u(LatticePoint{3}, 0), v(LatticePoint{0}, 0);

  auto same = simulate_pair(params, v, v, 10, 1);
  CHECK(same.meeting_time == 0);

  auto jt = simulate_pair(params, u, v, 2000, 7);
  REQUIRE(jt.differences.size() == 2001);
  bool absorbed = false;
  for (std::size_t n = 0; n < jt.differences.size(); ++n) {
    auto z = jt.differences[n];
    CHECK(z == jt.trace_u.steps[n].horiz - jt.trace_v.steps[n].horiz);
    CHECK(z[0] >= 0);  // d=2 non-crossing
    if (absorbed) {
      CHECK(z.is_zero());
      CHECK(jt.trace_u.steps[n] == jt.trace_v.steps[n]);
    }
    if (z.is_zero()) absorbed = true;
  }
  // replay
  auto jt2 = simulate_pair(params, u, v, 2000, 7);
  CHECK(jt2.meeting_time == jt.meeting_time);
  for (std::size_t n = 0; n < jt.differences.size(); ++n)
    CHECK(jt2.differences[n] == jt.differences[n]);
}

TEST_CASE("meeting probability: d=2 close pair almost surely meets at desk scale") {
  ModelParams params(2, 0.5);
  auto est = meeting_probability(params, LatticePoint{1}, 10000, 1000, 11);
  CHECK(est.value >= 0.9);

  // monotone in horizon on shared seeds
  auto lo = meeting_probability(params, LatticePoint{3}, 100, 400, 5);
  auto hi = meeting_probability(params, LatticePoint{3}, 10000, 400, 5);
  CHECK(hi.value >= lo.value);

  auto zero = meeting_probability(params, LatticePoint{0}, 10, 50, 1);
  CHECK(zero.value == 1.0);
}

TEST_CASE("meeting probability: d=4 distant pair stays bounded away from 1") {
  ModelParams params(4, 0.5);
  auto est = meeting_probability(params, LatticePoint{20, 0, 0}, 10000, 200, 3);
  CHECK(est.value < 0.9);
  MESSAGE("d=4 separation 20 meeting fraction by 1e4 steps: ", est.value);
}

TEST_CASE("martingale: mean of Z_n stays at z0") {
  ModelParams params(2, 0.3);
  auto rows = martingale_check(params, 10, {10, 100, 1000}, 10000, 2026);
  for (const auto& row : rows) {
    CHECK(std::abs(row.mean.mean - 10.0) <= 3 * row.mean.std_error);
  }
  auto z0rows = martingale_check(params, 0, {10, 50}, 100, 1);
  for (const auto& row : z0rows) CHECK(row.mean.mean == 0.0);
}

TEST_CASE("drift first moment approaches 4 m_2 at large separation") {
  ModelParams params(3, 0.5);
  double m2 = step_moment(params, 2);
  for (std::int64_t norm : {50, 100}) {
    auto est = drift_moment(params, LatticePoint{norm, 0}, 1, 100000, 91);
    CHECK(std::abs(est.estimate.mean - 4 * m2) <= 3 * est.estimate.std_error);
  }
}

TEST_CASE("drift second moment obeys the 2 alpha ||x||^2 lower bound") {
  ModelParams params(3, 0.5);
  double alpha = 4 * step_moment(params, 2);
  LatticePoint x{50, 0};
  auto est = drift_moment(params, x, 2, 100000, 92);
  CHECK(est.estimate.mean >= 2 * alpha * x.l2sq() - 3 * est.estimate.std_error);
}

TEST_CASE("independent-pair drift matches the exact product-law sum") {
  ModelParams params(3, 0.5);
  double expect = 4 * step_moment(params, 2) * step_moment(params, 0);
  auto est = drift_moment(params, LatticePoint{7, 3}, 1, 100000, 93, /*independent=*/true);
  CHECK(std::abs(est.estimate.mean - expect) <= 3 * est.estimate.std_error);
}

TEST_CASE("drift isotropy across directions of equal norm") {
  ModelParams params(3, 0.5);
  auto a = drift_moment(params, LatticePoint{60, 0}, 1, 50000, 94);
  auto b = drift_moment(params, LatticePoint{0, 60}, 1, 50000, 95);
  double joint_se = std::sqrt(a.estimate.std_error * a.estimate.std_error +
                              b.estimate.std_error * b.estimate.std_error);
  CHECK(std::abs(a.estimate.mean - b.estimate.mean) <= 3 * joint_se);
}

TEST_CASE("modified chain: d=2 recurrence probe vs d=4 transience probe") {
  auto r2 = modified_chain_return(ModelParams(2, 0.5), LatticePoint{1}, 100000, 20, 17);
  CHECK(r2.returned_fraction >= 0.99);
  CHECK(r2.excursions_started == r2.excursions_returned + 20);

  auto r4 = modified_chain_return(ModelParams(4, 0.5), LatticePoint{1, 0, 0}, 100000, 20, 17);
  CHECK(r4.returned_fraction < r2.returned_fraction);
  MESSAGE("returned fraction d=2: ", r2.returned_fraction, "  d=4: ", r4.returned_fraction);
}
