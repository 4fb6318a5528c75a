#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "drainage/environment.hpp"
#include "drainage/lattice.hpp"

// Finite-window realization of the drainage graph with degree, edge-length,
// component, ancestor and branching-point statistics. The environment is
// unbounded, so a window padded by the one-step search cap reproduces the
// infinite-lattice statistics exactly in distribution.

namespace drainage {

struct WindowVertex {
  SpacePoint site;
  SpacePoint target;    // h(site), one level down
  int in_degree = 0;    // exact for vertices inside the window box
};

// Open vertices of the padded slab [1-M, n+M]^{d-1} x [1, n+1], each with its
// drainage target and accumulated in-degree. The window box proper is
// [1, n]^{d-1} x [1, n]; the horizontal margin M covers every possible
// in-neighbor of a window vertex, so window degrees carry no boundary bias.
class ForestWindow {
 public:
  ForestWindow(const ModelParams& params, int n, std::uint64_t seed, int margin = 0)
      : params_(params), n_(n), seed_(seed), env_(params, seed) {
    if (n < 1) throw std::invalid_argument("ForestWindow: n must be >= 1");
    margin_ = margin > 0 ? margin : env_.search_cap();

    const int m = params_.displacement_dim();
    std::unordered_map<SpacePoint, int, SpacePointHash> indeg;

    // one pass over the padded slab in canonical (level, coords) order; each
    // open vertex contributes one out-edge and bumps its target's in-degree
    LatticePoint x(m);
    auto visit = [&](auto&& self, int i, std::int64_t level) -> void {
      if (i == m) {
        SpacePoint site(x, level);
        if (!env_.is_open(site)) return;
        WindowVertex v;
        v.site = site;
        v.target = env_.h_step(site);
        indeg[v.target] += 1;
        vertices_.push_back(v);
        return;
      }
      for (std::int64_t c = 1 - margin_; c <= n_ + margin_; ++c) {
        x[i] = c;
        self(self, i + 1, level);
      }
    };
    for (std::int64_t level = 1; level <= n_ + 1; ++level) visit(visit, 0, level);

    for (auto& v : vertices_) {
      auto it = indeg.find(v.site);
      if (it != indeg.end()) v.in_degree = it->second;
    }
  }

  const ModelParams& params() const { return params_; }
  int n() const { return n_; }
  int margin() const { return margin_; }
  std::uint64_t seed() const { return seed_; }
  const Environment& env() const { return env_; }
  const std::vector<WindowVertex>& vertices() const { return vertices_; }

  // window box membership: horizontal coords in [1, n], level in [1, n]
  bool in_window(const SpacePoint& s) const {
    if (s.level < 1 || s.level > n_) return false;
    for (int i = 0; i < s.horiz.dim; ++i)
      if (s.horiz[i] < 1 || s.horiz[i] > n_) return false;
    return true;
  }

 private:
  ModelParams params_;
  int n_;
  int margin_ = 0;
  std::uint64_t seed_;
  Environment env_;
  std::vector<WindowVertex> vertices_;
};

inline std::int64_t open_vertex_count(const ForestWindow& w) {
  std::int64_t c = 0;
  for (const auto& v : w.vertices())
    if (w.in_window(v.site)) ++c;
  return c;
}

// Number of window vertices with total degree nu + 1 (one down-edge plus nu
// up-edges).
inline std::int64_t degree_count(const ForestWindow& w, int nu) {
  if (nu < 0) throw std::invalid_argument("degree_count: nu must be >= 0");
  std::int64_t c = 0;
  for (const auto& v : w.vertices())
    if (w.in_window(v.site) && v.in_degree == nu) ++c;
  return c;
}

// Histogram over window vertices indexed by up-degree (in-degree).
inline std::vector<std::int64_t> degree_histogram(const ForestWindow& w) {
  std::vector<std::int64_t> h;
  for (const auto& v : w.vertices()) {
    if (!w.in_window(v.site)) continue;
    auto k = static_cast<std::size_t>(v.in_degree);
    if (k >= h.size()) h.resize(k + 1, 0);
    h[k] += 1;
  }
  return h;
}

// Number of edges of L1 length exactly l with at least one endpoint in the
// window box. The vertical unit contributes 1, so l = horizontal offset + 1.
inline std::int64_t edge_length_count(const ForestWindow& w, std::int64_t l) {
  if (l < 1) throw std::invalid_argument("edge_length_count: l must be >= 1");
  std::int64_t c = 0;
  for (const auto& v : w.vertices()) {
    if (!w.in_window(v.site) && !w.in_window(v.target)) continue;
    if ((v.site.horiz - v.target.horiz).l1() + 1 == l) ++c;
  }
  return c;
}

inline std::int64_t edge_count(const ForestWindow& w) {
  std::int64_t c = 0;
  for (const auto& v : w.vertices())
    if (w.in_window(v.site) || w.in_window(v.target)) ++c;
  return c;
}

// Multiplicity histogram of up-edges at horizontal offset exactly l: entry j
// counts window vertices with exactly j in-edges whose horizontal offset has
// L1 norm l. In d = 2 the multiplicity is at most 2 (one per side).
inline std::vector<std::int64_t> up_edge_offset_census(const ForestWindow& w, std::int64_t l) {
  if (l < 1) throw std::invalid_argument("up_edge_offset_census: l must be >= 1");
  std::unordered_map<SpacePoint, int, SpacePointHash> mult;
  for (const auto& v : w.vertices())
    if (w.in_window(v.target) && (v.site.horiz - v.target.horiz).l1() == l) mult[v.target] += 1;
  std::vector<std::int64_t> h(1, 0);
  for (const auto& v : w.vertices()) {
    if (!w.in_window(v.site)) continue;
    auto it = mult.find(v.site);
    auto j = static_cast<std::size_t>(it == mult.end() ? 0 : it->second);
    if (j >= h.size()) h.resize(j + 1, 0);
    h[j] += 1;
  }
  return h;
}

// Number of distinct h^T images of the open top-row window vertices:
// components of the window forest after a census depth of T merges.
inline std::int64_t tree_count(const ForestWindow& w, int T) {
  if (T < 0 || T > w.n()) throw std::invalid_argument("tree_count: need 0 <= T <= n");
  std::unordered_set<LatticePoint, LatticePointHash> cur;
  for (const auto& v : w.vertices())
    if (v.site.level == w.n() && w.in_window(v.site)) cur.insert(v.site.horiz);
  std::int64_t level = w.n();
  for (int t = 0; t < T; ++t) {
    std::unordered_set<LatticePoint, LatticePointHash> next;
    for (const auto& x : cur) next.insert(w.env().h_step(SpacePoint(x, level)).horiz);
    cur = std::move(next);
    --level;
  }
  return static_cast<std::int64_t>(cur.size());
}

namespace detail {

// Exact n-th-order ancestor image at the given depth: start from every open
// site at level t + n within half-width W + n * cap (no other source can
// reach the window, since one step moves at most cap), then apply h
// `down_steps` times. d = 2 only.
inline std::unordered_set<std::int64_t> ancestor_image(const Environment& env, std::int64_t t,
                                                       int n, std::int64_t W, int down_steps) {
  const std::int64_t reach = W + static_cast<std::int64_t>(n) * env.search_cap();
  std::unordered_set<std::int64_t> cur;
  for (std::int64_t x = -reach; x <= reach; ++x)
    if (env.is_open(SpacePoint(LatticePoint{x}, t + n))) cur.insert(x);
  std::int64_t level = t + n;
  for (int s = 0; s < down_steps; ++s) {
    std::unordered_set<std::int64_t> next;
    for (auto x : cur) next.insert(env.h_step(SpacePoint(LatticePoint{x}, level)).horiz[0]);
    cur = std::move(next);
    --level;
  }
  return cur;
}

}  // namespace detail

struct AncestorCensus {
  std::int64_t level = 0;
  std::int64_t half_width = 0;
  std::vector<std::pair<int, std::int64_t>> counts;  // (order n, count in [-W, W])
};

// Per order n, the number of open vertices at the given level inside [-W, W]
// that still have an n-th-order ancestor. The padded computation is exact, so
// the counts are nonincreasing in n replica by replica. d = 2 only.
inline AncestorCensus ancestor_census(const ModelParams& params, std::int64_t t,
                                      const std::vector<int>& orders, std::int64_t W,
                                      std::uint64_t seed) {
  if (params.d != 2) throw std::invalid_argument("ancestor_census: requires d = 2");
  if (W < 1) throw std::invalid_argument("ancestor_census: W must be >= 1");
  Environment env(params, seed);
  AncestorCensus ac;
  ac.level = t;
  ac.half_width = W;
  for (int n : orders) {
    if (n < 0) throw std::invalid_argument("ancestor_census: orders must be >= 0");
    auto image = detail::ancestor_image(env, t, n, W, n);
    std::int64_t c = 0;
    for (auto x : image)
      if (x >= -W && x <= W) ++c;
    ac.counts.emplace_back(n, c);
  }
  return ac;
}

struct BranchingStats {
  std::int64_t r0 = 0;          // level-0 vertices in [-W, W] with order-n ancestors
  std::int64_t r1 = 0;          // level-1 vertices in [-W, W] with order-(n-1) ancestors
  std::int64_t r0_branching = 0;  // those r0 vertices with >= 2 level-1 preimages
  bool inequality_holds = false;  // r1 - (r0 - 2) >= r0_branching - 2
};

// Branching-point counting on the finite-order ancestor proxy. The level-0
// proxy set is the h-image of the level-1 proxy set, and in d = 2 every
// preimage of a non-extreme window vertex lies inside the window (a farther
// source would have a strictly nearer open target), which makes the counting
// inequality deterministic.
inline BranchingStats branching_stats(const ModelParams& params, int order, std::int64_t W,
                                      std::uint64_t seed) {
  if (params.d != 2) throw std::invalid_argument("branching_stats: requires d = 2");
  if (order < 1) throw std::invalid_argument("branching_stats: order must be >= 1");
  if (W < 1) throw std::invalid_argument("branching_stats: W must be >= 1");
  Environment env(params, seed);

  // level-1 proxy set from sources at level `order`, stepped down order-1 times
  auto level1 = detail::ancestor_image(env, 0, order, W, order - 1);
  std::unordered_map<std::int64_t, int> preimages;  // level-0 target -> count
  BranchingStats bs;
  for (auto y : level1) {
    if (y >= -W && y <= W) ++bs.r1;
    preimages[env.h_step(SpacePoint(LatticePoint{y}, 1)).horiz[0]] += 1;
  }
  for (const auto& [x, cnt] : preimages) {
    if (x < -W || x > W) continue;
    ++bs.r0;
    if (cnt >= 2) ++bs.r0_branching;
  }
  bs.inequality_holds = bs.r1 - (bs.r0 - 2) >= bs.r0_branching - 2;
  return bs;
}

}  // namespace drainage
