#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

// Closed-form d = 2 laws: the degree distribution 1 + Y + X1 + X2 with
// Y ~ Bernoulli(p) and X1, X2 i.i.d. side counts, and the per-offset up-edge
// law Binomial(2, q_l).

namespace drainage {

namespace detail {

inline void check_prob(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("analytic law: p must lie strictly in (0,1)");
}

}  // namespace detail

// Tail of one side count: P(X1 >= r) = (1-p)^{2r-1} (2-p) / (2 (3-3p+p^2)^r)
// for r >= 1, and 1 for r = 0.
inline double x1_tail(double p, int r) {
  detail::check_prob(p);
  if (r < 0) throw std::invalid_argument("x1_tail: r must be >= 0");
  if (r == 0) return 1.0;
  double base = 3.0 - 3.0 * p + p * p;
  return std::pow(1.0 - p, 2.0 * r - 1.0) * (2.0 - p) / (2.0 * std::pow(base, r));
}

struct DegreeLaw {
  double p = 0.0;
  int cap = 0;
  std::vector<double> pmf;       // pmf[k] = P(degree = k), k = 0..cap, pmf[0] = 0
  double residual = 0.0;         // mass beyond cap
  double mean_recomputed = 0.0;  // 1 + p + 2 sum_{r>=1} P(X1 >= r)
};

// Exact convolution of 1 + Y + X1 + X2, truncated at degree `cap` with the
// residual tracked. The mean is recomputed from the tail series, which
// converges geometrically and sidesteps the truncation.
inline DegreeLaw degree_pmf(double p, int cap = 64) {
  detail::check_prob(p);
  if (cap < 1) throw std::invalid_argument("degree_pmf: cap must be >= 1");

  // side-count pmf up to cap
  std::vector<double> x(static_cast<std::size_t>(cap) + 1);
  for (int r = 0; r <= cap; ++r) x[static_cast<std::size_t>(r)] = x1_tail(p, r) - x1_tail(p, r + 1);

  DegreeLaw law;
  law.p = p;
  law.cap = cap;
  law.pmf.assign(static_cast<std::size_t>(cap) + 1, 0.0);
  for (int a = 0; a <= cap; ++a)
    for (int b = 0; a + b <= cap; ++b) {
      double w = x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(b)];
      int k0 = 1 + a + b;  // Y = 0
      if (k0 <= cap) law.pmf[static_cast<std::size_t>(k0)] += (1.0 - p) * w;
      if (k0 + 1 <= cap) law.pmf[static_cast<std::size_t>(k0 + 1)] += p * w;
    }
  double total = 0.0;
  for (double q : law.pmf) total += q;
  law.residual = 1.0 - total;

  double tail_sum = 0.0;
  for (int r = 1;; ++r) {
    double t = x1_tail(p, r);
    tail_sum += t;
    if (t < 1e-16) break;
  }
  law.mean_recomputed = 1.0 + p + 2.0 * tail_sum;
  return law;
}

// The expected degree of an open vertex is 2 for every p; the second value is
// the series recomputation used as a self-check.
inline std::pair<double, double> expected_degree(double p) {
  return {2.0, degree_pmf(p, 8).mean_recomputed};
}

struct EdgeOffsetLaw {
  double p = 0.0;
  std::int64_t l = 0;
  double q = 0.0;           // binomial parameter with the openness factor
  double q_verbatim = 0.0;  // the often-quoted parameter without it
  std::array<double, 3> pmf{};  // Binomial(2, q) over {0, 1, 2}
};

// Law of the number of up-edges at horizontal offset exactly l from an open
// vertex (d = 2): Binomial(2, q_l) with q_l = p (1 - p/2) (1-p)^{2l-1}. The
// leading factor p is the openness of the upper endpoint; without it the
// offsets would sum past the expected up-degree of 1. The unfactored value is
// kept for reference. The L1 edge length is the offset plus the vertical
// unit: l + 1.
inline EdgeOffsetLaw edge_offset_pmf(double p, std::int64_t l) {
  detail::check_prob(p);
  if (l < 1) throw std::invalid_argument("edge_offset_pmf: l must be >= 1");
  EdgeOffsetLaw law;
  law.p = p;
  law.l = l;
  law.q_verbatim = (1.0 - p / 2.0) * std::pow(1.0 - p, 2.0 * l - 1.0);
  law.q = p * law.q_verbatim;
  law.pmf = {(1.0 - law.q) * (1.0 - law.q), 2.0 * law.q * (1.0 - law.q), law.q * law.q};
  return law;
}

}  // namespace drainage
