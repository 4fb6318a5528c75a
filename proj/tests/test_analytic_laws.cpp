#include "doctest.h"

#include <cmath>
#include <vector>

#include "drainage/analytic_laws.hpp"
#include "drainage/forest_census.hpp"
#include "drainage/stats.hpp"

using namespace drainage;

TEST_CASE("side-count tail: base cases and closed values") {
  CHECK(x1_tail(0.5, 0) == 1.0);
  CHECK(x1_tail(0.5, 1) == doctest::Approx(3.0 / 14.0).epsilon(1e-12));
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double prev = 1.0;
    for (int r = 1; r <= 20; ++r) {
      double t = x1_tail(p, r);
      CHECK(t < prev);
      CHECK(t >= 0.0);
      prev = t;
    }
  }
  CHECK_THROWS_AS(x1_tail(0.5, -1), std::invalid_argument);
  CHECK_THROWS_AS(x1_tail(0.0, 1), std::invalid_argument);
}

TEST_CASE("side-count mean: tail summation equals (1-p)/2") {
  for (double p : {0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    double sum = 0.0;
    for (int r = 1; r <= 2000; ++r) sum += x1_tail(p, r);
    CHECK(sum == doctest::Approx((1.0 - p) / 2.0).epsilon(1e-10));
  }
}

TEST_CASE("degree pmf: normalization, mean, pinned values") {
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    auto law = degree_pmf(p);
    CHECK(law.pmf[0] == 0.0);
    double total = law.residual;
    for (double q : law.pmf) {
      CHECK(q >= 0.0);
      total += q;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(law.residual < 1e-12);
    CHECK(law.mean_recomputed == doctest::Approx(2.0).epsilon(1e-10));
    double mean = 0.0;
    for (std::size_t k = 0; k < law.pmf.size(); ++k) mean += static_cast<double>(k) * law.pmf[k];
    CHECK(mean == doctest::Approx(2.0).epsilon(1e-9));
  }

  auto half = degree_pmf(0.5);
  CHECK(half.pmf[1] == doctest::Approx(0.5 * (11.0 / 14.0) * (11.0 / 14.0)).epsilon(1e-12));

  auto near1 = degree_pmf(0.99);
  CHECK(near1.pmf[2] > 0.9);

  auto ed = expected_degree(0.5);
  CHECK(ed.first == 2.0);
  CHECK(ed.second == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(expected_degree(0.1).first == 2.0);

  CHECK_THROWS_AS(degree_pmf(0.5, 0), std::invalid_argument);
}

TEST_CASE("degree pmf matches window degrees in total variation") {
  ModelParams params(2, 0.5);
  ForestWindow w(params, 256, 404);
  auto hist = degree_histogram(w);
  auto open = static_cast<double>(open_vertex_count(w));
  auto law = degree_pmf(params.p);

  double tv = 0.0;
  for (std::size_t nu = 0; nu < std::max(hist.size(), law.pmf.size()); ++nu) {
    double emp = nu < hist.size() ? static_cast<double>(hist[nu]) / open : 0.0;
    std::size_t deg = nu + 1;
    double ana = deg < law.pmf.size() ? law.pmf[deg] : 0.0;
    tv += std::abs(emp - ana);
  }
  tv /= 2.0;
  MESSAGE("degree-law total variation at n=256: ", tv);
  CHECK(tv < 0.015);
}

TEST_CASE("edge-offset law: pinned parameter, ratio, conservation") {
  auto l1 = edge_offset_pmf(0.5, 1);
  CHECK(l1.q == doctest::Approx(0.1875).epsilon(1e-12));
  CHECK(l1.q_verbatim == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(l1.pmf[0] + l1.pmf[1] + l1.pmf[2] == doctest::Approx(1.0).epsilon(1e-12));

  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double ratio = std::pow(1.0 - p, -2.0);
    double sum = p;
    double prev = edge_offset_pmf(p, 1).q;
    sum += 2.0 * prev;
    for (std::int64_t l = 2; l <= 300 && prev > 1e-250; ++l) {
      double q = edge_offset_pmf(p, l).q;
      CHECK(prev / q == doctest::Approx(ratio).epsilon(1e-9));
      CHECK(q < prev);
      sum += 2.0 * q;
      prev = q;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(edge_offset_pmf(0.5, 0), std::invalid_argument);
}

TEST_CASE("edge-offset law matches per-vertex window frequencies") {
  // across-window standard errors from independent replicas
  ModelParams params(2, 0.5);
  const int R = 8;
  std::vector<ForestWindow> windows;
  windows.reserve(R);
  for (int r = 0; r < R; ++r)
    windows.emplace_back(params, 192, replica_seed(606, static_cast<std::uint64_t>(r)));

  for (std::int64_t l = 1; l <= 5; ++l) {
    auto law = edge_offset_pmf(params.p, l);
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<double> freqs;
      double expected_total = 0.0;
      for (const auto& w : windows) {
        auto h = up_edge_offset_census(w, l);
        auto open = static_cast<double>(open_vertex_count(w));
        double f = j < h.size() ? static_cast<double>(h[j]) / open : 0.0;
        freqs.push_back(f);
        expected_total += law.pmf[j] * open;
      }
      if (expected_total < 10.0) continue;  // cell too rare to resolve at this size
      auto m = mean_with_error(freqs);
      CHECK(std::abs(m.mean - law.pmf[j]) <= 3 * m.std_error + 1e-9);
    }
  }
}

TEST_CASE("direct-above edge frequency equals p") {
  ModelParams params(2, 0.5);
  std::vector<double> freqs;
  for (int r = 0; r < 8; ++r) {
    ForestWindow w(params, 192, replica_seed(707, static_cast<std::uint64_t>(r)));
    double open = static_cast<double>(open_vertex_count(w));
    double vertical = 0.0;
    for (const auto& v : w.vertices())
      if (w.in_window(v.target) && (v.site.horiz - v.target.horiz).l1() == 0) vertical += 1.0;
    freqs.push_back(vertical / open);
  }
  auto m = mean_with_error(freqs);
  CHECK(std::abs(m.mean - 0.5) <= 3 * m.std_error + 1e-9);
}
