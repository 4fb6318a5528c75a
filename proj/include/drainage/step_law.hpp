#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "drainage/errors.hpp"
#include "drainage/lattice.hpp"
#include "drainage/rng.hpp"

// Closed-form one-step displacement law of a drainage path: mass p at the
// origin, and mass (1-p)^{#D_{k-1}} (1 - (1-p)^{#dD_k}) spread uniformly over
// the L1 shell of radius k, in any displacement dimension.

namespace drainage {

namespace detail {
inline std::uint64_t binom(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  if (r > n - r) r = n - r;
  std::uint64_t acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) acc = acc * (n - r + i) / i;
  return acc;
}
}  // namespace detail

// Number of integer points with L1 norm <= k in Z^m:
//   sum_i 2^i C(m,i) C(k,i).
// For m = 2 this reduces to 1 + 2k(k+1).
inline std::uint64_t diamond_size(int m, std::int64_t k) {
  if (m < 1) throw std::invalid_argument("diamond_size: m must be >= 1");
  if (k < 0) return 0;
  std::uint64_t total = 0;
  std::uint64_t pow2 = 1;
  for (int i = 0; i <= m; ++i) {
    total += pow2 * detail::binom(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(i)) *
             detail::binom(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
    pow2 *= 2;
  }
  return total;
}

// Number of integer points with L1 norm exactly k in Z^m.
inline std::uint64_t shell_size(int m, std::int64_t k) {
  if (m < 1) throw std::invalid_argument("shell_size: m must be >= 1");
  if (k < 0) return 0;
  if (k == 0) return 1;
  return diamond_size(m, k) - diamond_size(m, k - 1);
}

// Smallest k such that the probability that every site of D_{k-1} is closed
// falls below `tail`, i.e. (1-p)^{#D_{k-1}} < tail.
inline int truncation_radius(int m, double p, double tail) {
  double log_q = std::log1p(-p);  // log(1-p) < 0
  for (int k = 1;; ++k) {
    double log_mass = static_cast<double>(diamond_size(m, k - 1)) * log_q;
    if (log_mass < std::log(tail)) return k;
  }
}

class StepLaw {
 public:
  StepLaw(const ModelParams& params, int k_max)
      : params_(params), m_(params.displacement_dim()), k_max_(k_max) {
    params_.validate();
    if (k_max_ < 1) throw std::invalid_argument("StepLaw: k_max must be >= 1");
    build();
  }

  // Default truncation: residual mass below 1e-12, under every experiment's
  // measurement noise.
  explicit StepLaw(const ModelParams& params)
      : StepLaw(params, truncation_radius(params.displacement_dim(), params.p, 1e-12)) {}

  const ModelParams& params() const { return params_; }
  int displacement_dim() const { return m_; }
  int k_max() const { return k_max_; }
  double tail_mass() const { return tail_mass_; }

  // P(one-step displacement has L1 norm exactly k).
  double shell_probability(std::int64_t k) const {
    if (k < 0 || k > k_max_)
      throw std::out_of_range("StepLaw::shell_probability: radius beyond truncation");
    return shell_prob_[static_cast<std::size_t>(k)];
  }

  // Per-site mass on the radius-k shell (the law is constant on each shell).
  double site_probability(std::int64_t k) const {
    if (k == 0) return shell_probability(0);
    return shell_probability(k) / static_cast<double>(shell_size(m_, k));
  }

  double probability_of(const LatticePoint& u) const {
    std::int64_t k = u.l1();
    if (k > k_max_) return 0.0;
    return site_probability(k);
  }

  // Radius-then-uniform-shell sampler; exact because the law puts equal mass
  // on every site of a shell.
  LatticePoint sample(RngStream& rng) const {
    double u = rng.uniform();
    double acc = 0.0;
    for (int k = 0; k <= k_max_; ++k) {
      acc += shell_prob_[static_cast<std::size_t>(k)];
      if (u <= acc) {
        if (k == 0) return LatticePoint(m_);
        const auto& shell = shell_points(k);
        return shell[static_cast<std::size_t>(rng.below(shell.size()))];
      }
    }
    // Residual mass <= tail_mass <= 1e-12; never silently absorbed.
    throw SearchExhausted("StepLaw::sample: draw fell in truncated tail");
  }

  const std::vector<LatticePoint>& shell_points(std::int64_t k) const {
    if (k < 1 || k > k_max_)
      throw std::out_of_range("StepLaw::shell_points: radius beyond truncation");
    return shell_pts_[static_cast<std::size_t>(k - 1)];
  }

 private:
  void build() {
    double q = 1.0 - params_.p;
    shell_prob_.resize(static_cast<std::size_t>(k_max_) + 1);
    shell_prob_[0] = params_.p;
    double total = params_.p;
    for (int k = 1; k <= k_max_; ++k) {
      double closed_inner = std::pow(q, static_cast<double>(diamond_size(m_, k - 1)));
      double some_open = 1.0 - std::pow(q, static_cast<double>(shell_size(m_, k)));
      shell_prob_[static_cast<std::size_t>(k)] = closed_inner * some_open;
      total += shell_prob_[static_cast<std::size_t>(k)];
    }
    tail_mass_ = 1.0 - total;

    shell_pts_.resize(static_cast<std::size_t>(k_max_));
    for (int k = 1; k <= k_max_; ++k) {
      auto& pts = shell_pts_[static_cast<std::size_t>(k - 1)];
      pts.reserve(shell_size(m_, k));
      for_each_shell_point(m_, k, [&](const LatticePoint& v) { pts.push_back(v); });
    }
  }

  ModelParams params_;
  int m_;
  int k_max_;
  std::vector<double> shell_prob_;
  double tail_mass_ = 0.0;
  std::vector<std::vector<LatticePoint>> shell_pts_;
};

// Moment m_i (j = 0) or m_{i,j} of the step law: sum of u_1^i u_2^j over the
// displacement lattice, truncated once the analytic shell tail bound
// k^{i+j} (1-p)^{#D_{k-1}} summed over the remaining shells drops below tol.
// Odd orders vanish by symmetry and are returned as exact zeros.
inline double step_moment(const ModelParams& params, int i, int j = 0, double tol = 1e-12) {
  params.validate();
  if (i < 0 || j < 0) throw std::invalid_argument("step_moment: orders must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("step_moment: tol must be > 0");
  if (i % 2 == 1 || j % 2 == 1) return 0.0;

  const int m = params.displacement_dim();
  if (j > 0 && m < 2) throw std::invalid_argument("step_moment: m_{i,j} needs dimension >= 2");
  const double q = 1.0 - params.p;
  const int order = i + j;

  double total = (i == 0 && j == 0) ? params.p : 0.0;  // origin term
  for (std::int64_t k = 1;; ++k) {
    double closed_inner = std::pow(q, static_cast<double>(diamond_size(m, k - 1)));
    double some_open = 1.0 - std::pow(q, static_cast<double>(shell_size(m, k)));
    double per_site = closed_inner * some_open / static_cast<double>(shell_size(m, k));
    double shell_sum = 0.0;
    for_each_shell_point(m, k, [&](const LatticePoint& u) {
      double term = per_site;
      for (int a = 0; a < i; ++a) term *= static_cast<double>(u[0]);
      for (int a = 0; a < j; ++a) term *= static_cast<double>(u[1]);
      shell_sum += term;
    });
    total += shell_sum;

    // Remaining mass is at most (1-p)^{#D_k}; each remaining shell r
    // contributes at most r^order times its mass.
    double tail_bound = 0.0;
    for (std::int64_t r = k + 1;; ++r) {
      double t = std::pow(static_cast<double>(r), order) *
                 std::pow(q, static_cast<double>(diamond_size(m, r - 1)));
      tail_bound += t;
      if (t < tol * 1e-6 || t == 0.0) break;
    }
    if (tail_bound < tol) break;
  }
  return total;
}

}  // namespace drainage
