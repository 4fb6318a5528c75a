#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "drainage/errors.hpp"
#include "drainage/lattice.hpp"
#include "drainage/rng.hpp"
#include "drainage/step_law.hpp"

// Lazy, unbounded, seeded realization of the site configuration and the
// tie-break uniforms. Every query is a pure function of (seed, coordinates),
// so no storage is needed and replay is exact.

namespace drainage {

struct PathTrace {
  SpacePoint origin;
  std::vector<SpacePoint> steps;  // h^0(u), h^1(u), ..., h^n(u)
};

class Environment {
 public:
  Environment(const ModelParams& params, std::uint64_t seed)
      : params_(params),
        seed_(seed),
        r_max_(truncation_radius(params.displacement_dim(), params.p, 1e-15)) {
    params_.validate();
  }

  Environment(const ModelParams& params, std::uint64_t seed, int r_max)
      : params_(params), seed_(seed), r_max_(r_max) {
    params_.validate();
  }

  const ModelParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  int search_cap() const { return r_max_; }

  bool is_open(const SpacePoint& site) const {
    KeyedHash h(seed_, Stream::kOpenness);
    h.absorb(site.level);
    for (int i = 0; i < site.horiz.dim; ++i) h.absorb(site.horiz[i]);
    return h.uniform() < params_.p;
  }

  // Uniform (0,1] attached to the ordered pair (from, to), to one level down.
  double tie_break(const SpacePoint& from, const SpacePoint& to) const {
    if (to.level != from.level - 1)
      throw std::invalid_argument("Environment::tie_break: to.level must be from.level - 1");
    KeyedHash h(seed_, Stream::kTieBreak);
    h.absorb(from.level);
    for (int i = 0; i < from.horiz.dim; ++i) h.absorb(from.horiz[i]);
    for (int i = 0; i < to.horiz.dim; ++i) h.absorb(to.horiz[i]);
    return h.uniform();
  }

  // Drainage target of u: the open site one level down minimizing horizontal
  // L1 distance, ties resolved by the minimal pair uniform. Defined for every
  // u, open or closed. Search grows L1 shells around the projection of u.
  SpacePoint h_step(const SpacePoint& u) const {
    const int m = params_.displacement_dim();
    const std::int64_t below = u.level - 1;
    for (int k = 0; k <= r_max_; ++k) {
      SpacePoint best;
      double best_tie = std::numeric_limits<double>::infinity();
      bool found = false;
      for_each_shell_point(m, k, [&](const LatticePoint& off) {
        SpacePoint cand(u.horiz + off, below);
        if (!is_open(cand)) return;
        double t = tie_break(u, cand);
        if (t < best_tie) {
          best_tie = t;
          best = cand;
          found = true;
        }
      });
      if (found) return best;
    }
    throw SearchExhausted("Environment::h_step: no open site within " +
                          std::to_string(r_max_) + " shells of " + u.horiz.str());
  }

  PathTrace path(const SpacePoint& u, int n) const {
    if (n < 0) throw std::invalid_argument("Environment::path: n must be >= 0");
    PathTrace tr;
    tr.origin = u;
    tr.steps.reserve(static_cast<std::size_t>(n) + 1);
    tr.steps.push_back(u);
    SpacePoint cur = u;
    for (int i = 0; i < n; ++i) {
      cur = h_step(cur);
      tr.steps.push_back(cur);
    }
    return tr;
  }

 private:
  ModelParams params_;
  std::uint64_t seed_;
  int r_max_;
};

}  // namespace drainage
