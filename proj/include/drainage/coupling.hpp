#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "drainage/environment.hpp"
#include "drainage/errors.hpp"
#include "drainage/lattice.hpp"
#include "drainage/rng.hpp"
#include "drainage/stats.hpp"
#include "drainage/step_law.hpp"

// Explicit coupling of two tree paths with two independent random walks.
// Four independent uniform collections drive one step: U1u/U2u indexed around
// the first walker, U1v/U2v around the second. When the search diamonds are
// disjoint the tree step of the second walker coincides with its
// independent-walk step.

namespace drainage {

// Accessor for the four uniform collections of one coupling step. `epoch`
// separates steps of an iterated run.
class CouplingUniforms {
 public:
  CouplingUniforms(std::uint64_t seed, std::uint64_t epoch) : seed_(seed), epoch_(epoch) {}

  double u1u(const LatticePoint& z) const { return at(Stream::kCouplingU1u, z); }
  double u2u(const LatticePoint& z) const { return at(Stream::kCouplingU2u, z); }
  double u1v(const LatticePoint& z) const { return at(Stream::kCouplingU1v, z); }
  double u2v(const LatticePoint& z) const { return at(Stream::kCouplingU2v, z); }

 private:
  double at(Stream stream, const LatticePoint& z) const {
    KeyedHash h(seed_, stream);
    h.absorb(epoch_);
    for (int i = 0; i < z.dim; ++i) h.absorb(z[i]);
    return h.uniform();
  }
  std::uint64_t seed_;
  std::uint64_t epoch_;
};

struct CouplingStep {
  LatticePoint u, v;       // current horizontal positions
  int k_u = 0, l_v = 0, m_v = 0;
  LatticePoint phi, zeta, psi;
  bool diamonds_disjoint = false;
};

namespace detail {

constexpr int kCouplingSearchCap = 1 << 12;

template <typename Pred>
int grow_until(int m, const LatticePoint& center, Pred&& shell_has_hit) {
  for (int k = 0; k <= kCouplingSearchCap; ++k)
    if (shell_has_hit(k)) return k;
  throw SearchExhausted("coupling: no open site within search cap");
}

}  // namespace detail

// One coupling step from horizontal positions u (first walker) and v
// (second). Produces the independent-walk targets (phi, zeta) and the
// tree-pair target psi of the second walker.
inline CouplingStep coupling_step(const ModelParams& params, const LatticePoint& u,
                                  const LatticePoint& v, const CouplingUniforms& uni) {
  const int m = params.displacement_dim();
  const double p = params.p;
  CouplingStep st;
  st.u = u;
  st.v = v;

  // k_u: first diamond around u holding a U1u-open site; l_v likewise for v.
  st.k_u = detail::grow_until(m, u, [&](int k) {
    bool hit = false;
    for_each_shell_point(m, k, [&](const LatticePoint& off) {
      if (uni.u1u(u + off) < p) hit = true;
    });
    return hit;
  });
  st.l_v = detail::grow_until(m, v, [&](int k) {
    bool hit = false;
    for_each_shell_point(m, k, [&](const LatticePoint& off) {
      if (uni.u1v(v + off) < p) hit = true;
    });
    return hit;
  });

  // m_v: outside u's settled diamond the second walker reads its own U1v
  // field, inside it the shared U1u field.
  auto in_u_diamond = [&](const LatticePoint& z) { return (z - u).l1() <= st.k_u; };
  st.m_v = detail::grow_until(m, v, [&](int k) {
    bool hit = false;
    for_each_shell_point(m, k, [&](const LatticePoint& off) {
      LatticePoint z = v + off;
      double val = in_u_diamond(z) ? uni.u1u(z) : uni.u1v(z);
      if (val < p) hit = true;
    });
    return hit;
  });

  // phi: U2u-minimizer over the open sites of u's diamond.
  double best;
  best = std::numeric_limits<double>::infinity();
  for_each_diamond_point(m, st.k_u, [&](const LatticePoint& off) {
    LatticePoint z = u + off;
    if (uni.u1u(z) >= p) return;
    double t = uni.u2u(z);
    if (t < best) {
      best = t;
      st.phi = z;
    }
  });

  // zeta: U2v-minimizer over the U1v-open sites of v's own diamond.
  best = std::numeric_limits<double>::infinity();
  for_each_diamond_point(m, st.l_v, [&](const LatticePoint& off) {
    LatticePoint z = v + off;
    if (uni.u1v(z) >= p) return;
    double t = uni.u2v(z);
    if (t < best) {
      best = t;
      st.zeta = z;
    }
  });

  // psi: U2v-minimizer over the mixed-field open sites of the m_v diamond.
  best = std::numeric_limits<double>::infinity();
  for_each_diamond_point(m, st.m_v, [&](const LatticePoint& off) {
    LatticePoint z = v + off;
    double val = in_u_diamond(z) ? uni.u1u(z) : uni.u1v(z);
    if (val >= p) return;
    double t = uni.u2v(z);
    if (t < best) {
      best = t;
      st.psi = z;
    }
  });

  st.diamonds_disjoint = (u - v).l1() > static_cast<std::int64_t>(st.k_u) + st.m_v;
  return st;
}

struct CouplingRun {
  std::vector<CouplingStep> steps;
  std::vector<LatticePoint> walk_u;   // phi iterates
  std::vector<LatticePoint> walk_v;   // zeta iterates (independent walk)
  std::vector<LatticePoint> tree_v;   // psi iterates (tree path)
  std::optional<int> first_decoupling;
};

// Iterate the coupling for n steps. The first walker's iterate drives both
// its walk and its tree; the second walker's zeta- and psi-iterates coincide
// until the first decoupling step.
inline CouplingRun run_coupling(const ModelParams& params, const LatticePoint& u0,
                                const LatticePoint& v0, int n, std::uint64_t seed) {
  CouplingRun run;
  run.walk_u.push_back(u0);
  run.walk_v.push_back(v0);
  run.tree_v.push_back(v0);
  LatticePoint u = u0, wv = v0, tv = v0;
  for (int i = 0; i < n; ++i) {
    CouplingUniforms uni(seed, static_cast<std::uint64_t>(i));
    CouplingStep st = coupling_step(params, u, tv, uni);
    // zeta of the independent walk is evaluated at its own current position;
    // identical to st.zeta while wv == tv.
    LatticePoint next_wv;
    if (wv == tv) {
      next_wv = st.zeta;
    } else {
      CouplingStep wst = coupling_step(params, u, wv, uni);
      next_wv = wst.zeta;
    }
    if (!run.first_decoupling && st.zeta != st.psi) run.first_decoupling = i;
    u = st.phi;
    tv = st.psi;
    wv = next_wv;
    run.steps.push_back(st);
    run.walk_u.push_back(u);
    run.walk_v.push_back(wv);
    run.tree_v.push_back(tv);
  }
  return run;
}

struct DecouplingEstimate {
  ProportionEstimate empirical;       // P(zeta != psi)
  double analytic_bound = 0.0;        // 2 (1-p)^{#Delta_{k0-1}}, k0 = floor(sep/2)
  double loose_bound = 0.0;           // 2 (1-p)^{#Delta_{k0}}, the often-quoted form
  std::int64_t separation = 0;
};

// Single-step decoupling probability at the given L1 separation, against the
// exact pre-bound behind the exp(-C ||u-v||^3) estimate. Decoupling requires
// k_u >= k0 or m_v >= k0, and each of those radius tails equals
// (1-p)^{#Delta_{k0-1}} (no open site strictly inside the radius-k0 diamond),
// so the exact union bound carries the exponent #Delta_{k0-1}. The variant
// with exponent #Delta_{k0} overstates the decay by one shell and is reported
// only for reference; measurably small separations violate it.
inline DecouplingEstimate decoupling_probability(const ModelParams& params, std::int64_t separation,
                                                 int replicas, std::uint64_t seed) {
  if (separation < 1) throw std::invalid_argument("decoupling_probability: separation must be >= 1");
  const int m = params.displacement_dim();
  LatticePoint u(m), v(m);
  v[0] = separation;

  std::size_t decoupled = 0;
  for (int i = 0; i < replicas; ++i) {
    CouplingUniforms uni(replica_seed(seed, static_cast<std::uint64_t>(i)), 0);
    CouplingStep st = coupling_step(params, u, v, uni);
    if (st.diamonds_disjoint && st.zeta != st.psi)
      throw std::logic_error("coupling invariant violated: disjoint diamonds but zeta != psi");
    if (st.zeta != st.psi) ++decoupled;
  }
  DecouplingEstimate de;
  de.separation = separation;
  de.empirical = proportion(decoupled, static_cast<std::size_t>(replicas));
  std::int64_t k0 = separation / 2;
  double inner = k0 >= 1 ? static_cast<double>(diamond_size(m, static_cast<int>(k0) - 1)) : 0.0;
  de.analytic_bound = 2.0 * std::pow(1.0 - params.p, inner);
  de.loose_bound =
      2.0 * std::pow(1.0 - params.p, static_cast<double>(diamond_size(m, static_cast<int>(k0))));
  return de;
}

enum class WalkEvent { kCloseApproach, kEscapeAnnulus, kCollapseAnnulus, kGoodSeparation };
// E: the walks come within K log n; F: final difference outside the outer
// diamond; G: final difference inside the inner diamond; B: final difference
// in the annulus with no close approach.

inline WalkEvent parse_walk_event(char c) {
  switch (c) {
    case 'E': return WalkEvent::kCloseApproach;
    case 'F': return WalkEvent::kEscapeAnnulus;
    case 'G': return WalkEvent::kCollapseAnnulus;
    case 'B': return WalkEvent::kGoodSeparation;
    default: throw std::invalid_argument("walk event must be one of B, E, F, G");
  }
}

// Smallest K with (|log(1-p)|/2) K^3 > 4, i.e. K^3 > 8 / |log(1-p)|.
inline double default_close_approach_scale(double p) {
  double c2 = 0.5 * std::abs(std::log1p(-p));
  double k = std::cbrt(4.0 / c2);
  double ki = std::ceil(k);
  if (ki * ki * ki * c2 <= 4.0) ki += 1.0;
  return ki;
}

struct EventEstimate {
  ProportionEstimate probability;
  int n = 0;
  double epsilon = 0.0;
  double close_approach_radius = 0.0;  // K log n, only meaningful for B and E
};

// Monte Carlo probability of one of the events B, E, F, G for two independent
// step-law walks over n^4 steps, started at separation v.
inline EventEstimate event_probability(const ModelParams& params, int n, double epsilon,
                                       WalkEvent event, int replicas, std::uint64_t seed,
                                       const LatticePoint& v, double close_scale = 0.0) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0))
    throw std::invalid_argument("event_probability: epsilon must lie in (0, 1/3)");
  if (n < 2) throw std::invalid_argument("event_probability: n must be >= 2");
  if (n > 8)
    throw BudgetExceeded("event_probability: n^4 steps intractable for n > 8");

  const int steps = n * n * n * n;
  const double outer = std::pow(n, 2.0 * (1.0 + epsilon));
  const double inner = std::pow(n, 2.0 * (1.0 - epsilon));
  if (close_scale <= 0.0) close_scale = default_close_approach_scale(params.p);
  const double close_radius = close_scale * std::log(static_cast<double>(n));

  StepLaw law(params);
  std::size_t hits = 0;
  for (int i = 0; i < replicas; ++i) {
    RngStream rng(replica_seed(seed, static_cast<std::uint64_t>(i)));
    LatticePoint diff = LatticePoint(params.displacement_dim()) - v;  // X-walk minus Y-walk
    bool close = false;
    for (int s = 0; s < steps; ++s) {
      diff = diff + law.sample(rng) - law.sample(rng);
      if (static_cast<double>(diff.l1()) < close_radius) close = true;
    }
    double final_l1 = static_cast<double>(diff.l1());
    bool hit = false;
    switch (event) {
      case WalkEvent::kCloseApproach: hit = close; break;
      case WalkEvent::kEscapeAnnulus: hit = final_l1 > outer; break;
      case WalkEvent::kCollapseAnnulus: hit = final_l1 <= inner; break;
      case WalkEvent::kGoodSeparation: hit = !close && final_l1 <= outer && final_l1 > inner; break;
    }
    if (hit) ++hits;
  }
  EventEstimate est;
  est.probability = proportion(hits, static_cast<std::size_t>(replicas));
  est.n = n;
  est.epsilon = epsilon;
  est.close_approach_radius = close_radius;
  return est;
}

// Probability that k tree paths started at pairwise separations within
// [n^{1-eps}, n^{1+eps}] stay pairwise distinct for n^4 steps. Paths are the
// actual drainage paths of a shared environment.
inline ProportionEstimate multi_path_escape(const ModelParams& params, int k, int n, double epsilon,
                                            std::uint64_t seed, int replicas) {
  if (k < 2) throw std::invalid_argument("multi_path_escape: need k >= 2 paths");
  if (n > 8)
    throw BudgetExceeded("multi_path_escape: n^4 steps intractable for n > 8");
  const double lo = std::pow(n, 1.0 - epsilon);
  const double hi = std::pow(n, 1.0 + epsilon);
  const auto spacing = static_cast<std::int64_t>(std::ceil(lo));
  if (static_cast<double>(spacing) * (k - 1) > hi)
    throw std::invalid_argument(
        "multi_path_escape: cannot place k colinear starts with pairwise separations in "
        "[n^{1-eps}, n^{1+eps}]");

  const int m = params.displacement_dim();
  const int steps = n * n * n * n;
  std::size_t escaped = 0;
  std::vector<SpacePoint> cur(static_cast<std::size_t>(k));
  for (int rep = 0; rep < replicas; ++rep) {
    Environment env(params, replica_seed(seed, static_cast<std::uint64_t>(rep)));
    for (int i = 0; i < k; ++i) {
      LatticePoint x(m);
      x[0] = spacing * i;
      cur[static_cast<std::size_t>(i)] = SpacePoint(x, 0);
    }
    bool distinct = true;
    for (int s = 0; s < steps && distinct; ++s) {
      for (auto& c : cur) c = env.h_step(c);
      for (int a = 0; a < k && distinct; ++a)
        for (int b = a + 1; b < k; ++b)
          if (cur[static_cast<std::size_t>(a)] == cur[static_cast<std::size_t>(b)]) {
            distinct = false;
            break;
          }
    }
    if (distinct) ++escaped;
  }
  return proportion(escaped, static_cast<std::size_t>(replicas));
}

}  // namespace drainage
