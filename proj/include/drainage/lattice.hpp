#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>

#include "drainage/rng.hpp"

namespace drainage {

// Global knobs of every experiment: lattice dimension d and open-site
// probability p. Displacements live in dimension m = d - 1.
struct ModelParams {
  int d = 2;
  double p = 0.5;

  ModelParams() = default;
  ModelParams(int dim, double prob) : d(dim), p(prob) { validate(); }

  void validate() const {
    if (d < 2) throw std::invalid_argument("ModelParams: d must be >= 2");
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("ModelParams: p must lie strictly in (0,1)");
  }
  int displacement_dim() const { return d - 1; }
};

// Integer vector in the displacement lattice Z^m, m <= 4.
struct LatticePoint {
  static constexpr int kMaxDim = 4;

  int dim = 0;
  std::array<std::int64_t, kMaxDim> c{};

  LatticePoint() = default;
  explicit LatticePoint(int m) : dim(m) { c.fill(0); }
  LatticePoint(std::initializer_list<std::int64_t> xs) {
    dim = static_cast<int>(xs.size());
    int i = 0;
    for (auto x : xs) c[static_cast<std::size_t>(i++)] = x;
    for (; i < kMaxDim; ++i) c[static_cast<std::size_t>(i)] = 0;
  }

  std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) {
    for (int i = 0; i < a.dim; ++i) a[i] += b[i];
    return a;
  }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) {
    for (int i = 0; i < a.dim; ++i) a[i] -= b[i];
    return a;
  }
  friend bool operator==(const LatticePoint& a, const LatticePoint& b) {
    if (a.dim != b.dim) return false;
    for (int i = 0; i < a.dim; ++i) if (a[i] != b[i]) return false;
    return true;
  }
  friend bool operator!=(const LatticePoint& a, const LatticePoint& b) { return !(a == b); }

  bool is_zero() const {
    for (int i = 0; i < dim; ++i) if (c[static_cast<std::size_t>(i)] != 0) return false;
    return true;
  }
  std::int64_t l1() const {
    std::int64_t s = 0;
    for (int i = 0; i < dim; ++i) s += std::abs(c[static_cast<std::size_t>(i)]);
    return s;
  }
  double l2sq() const {
    double s = 0;
    for (int i = 0; i < dim; ++i) {
      double x = static_cast<double>(c[static_cast<std::size_t>(i)]);
      s += x * x;
    }
    return s;
  }

  std::uint64_t hash() const {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(dim));
    for (int i = 0; i < dim; ++i)
      h = mix64(h ^ static_cast<std::uint64_t>(c[static_cast<std::size_t>(i)]));
    return h;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
      if (i) s += ",";
      s += std::to_string(c[static_cast<std::size_t>(i)]);
    }
    return s + ")";
  }
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& v) const {
    return static_cast<std::size_t>(v.hash());
  }
};

// Site of Z^d split as (horizontal displacement coords, vertical level).
struct SpacePoint {
  LatticePoint horiz;  // dimension d-1
  std::int64_t level = 0;

  SpacePoint() = default;
  SpacePoint(LatticePoint h, std::int64_t lvl) : horiz(h), level(lvl) {}

  friend bool operator==(const SpacePoint& a, const SpacePoint& b) {
    return a.level == b.level && a.horiz == b.horiz;
  }
  friend bool operator!=(const SpacePoint& a, const SpacePoint& b) { return !(a == b); }
  friend bool operator<(const SpacePoint& a, const SpacePoint& b) {
    if (a.level != b.level) return a.level < b.level;
    for (int i = 0; i < a.horiz.dim; ++i)
      if (a.horiz[i] != b.horiz[i]) return a.horiz[i] < b.horiz[i];
    return false;
  }
};

struct SpacePointHash {
  std::size_t operator()(const SpacePoint& s) const {
    return static_cast<std::size_t>(mix64(s.horiz.hash() ^ mix64(static_cast<std::uint64_t>(s.level))));
  }
};

// Visit every point of Z^m with L1 norm exactly k (the shell delta-D_k),
// in a fixed deterministic order.
template <typename Fn>
void for_each_shell_point(int m, std::int64_t k, Fn&& fn) {
  LatticePoint pt(m);
  // Recursive assignment of coordinates with a remaining-norm budget; the
  // last coordinate absorbs the exact remainder.
  auto rec = [&](auto&& self, int i, std::int64_t rem) -> void {
    if (i == m - 1) {
      if (rem == 0) {
        pt[i] = 0;
        fn(pt);
      } else {
        pt[i] = rem;
        fn(pt);
        pt[i] = -rem;
        fn(pt);
      }
      return;
    }
    for (std::int64_t x = -rem; x <= rem; ++x) {
      pt[i] = x;
      self(self, i + 1, rem - std::abs(x));
    }
  };
  rec(rec, 0, k);
}

// Visit every point of Z^m with L1 norm at most k (the diamond D_k).
template <typename Fn>
void for_each_diamond_point(int m, std::int64_t k, Fn&& fn) {
  for (std::int64_t r = 0; r <= k; ++r) for_each_shell_point(m, r, fn);
}

}  // namespace drainage
