#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "drainage/environment.hpp"
#include "drainage/stats.hpp"

// Joint two-path dynamics: the difference chain Z_n of two drainage paths in
// one shared environment, meeting-time estimation, martingale and drift
// diagnostics, and the origin-restarted modified chain.

namespace drainage {

struct JointTrace {
  PathTrace trace_u;
  PathTrace trace_v;
  std::vector<LatticePoint> differences;   // Z_n = horiz(u_n) - horiz(v_n)
  std::optional<int> meeting_time;         // tau; empty if censored at horizon
};

// Advance both paths through one shared environment until horizon or meeting.
// Past the meeting time both traces coincide (h is a function of position),
// so the tail is filled from a single walker.
inline JointTrace simulate_pair(const ModelParams& params, const SpacePoint& u,
                                const SpacePoint& v, int horizon, std::uint64_t seed) {
  if (u.level != v.level)
    throw std::invalid_argument("simulate_pair: u and v must share a level");
  if (horizon < 1) throw std::invalid_argument("simulate_pair: horizon must be >= 1");

  Environment env(params, seed);
  JointTrace jt;
  jt.trace_u.origin = u;
  jt.trace_v.origin = v;
  jt.trace_u.steps.push_back(u);
  jt.trace_v.steps.push_back(v);
  jt.differences.push_back(u.horiz - v.horiz);
  if (u == v) jt.meeting_time = 0;

  SpacePoint cu = u, cv = v;
  for (int n = 1; n <= horizon; ++n) {
    bool met = jt.meeting_time.has_value();
    cu = env.h_step(cu);
    cv = met ? cu : env.h_step(cv);
    jt.trace_u.steps.push_back(cu);
    jt.trace_v.steps.push_back(cv);
    jt.differences.push_back(cu.horiz - cv.horiz);
    if (!jt.meeting_time && cu == cv) jt.meeting_time = n;
  }
  return jt;
}

// Fraction of replicas in which two paths at the given horizontal separation
// meet by the horizon. Replica i uses the derived seed of (seed, i), so the
// estimate is monotone nondecreasing in horizon on a fixed seed set.
inline ProportionEstimate meeting_probability(const ModelParams& params,
                                              const LatticePoint& separation, int horizon,
                                              int replicas, std::uint64_t seed) {
  if (replicas < 1) throw std::invalid_argument("meeting_probability: replicas must be >= 1");
  if (separation.is_zero()) {
    auto r = proportion(static_cast<std::size_t>(replicas), static_cast<std::size_t>(replicas));
    return r;  // exactly 1
  }
  SpacePoint u(separation, 0), v(LatticePoint(params.displacement_dim()), 0);
  std::size_t met = 0;
  for (int i = 0; i < replicas; ++i) {
    auto jt = simulate_pair(params, u, v, horizon, replica_seed(seed, static_cast<std::uint64_t>(i)));
    if (jt.meeting_time) ++met;
  }
  return proportion(met, static_cast<std::size_t>(replicas));
}

struct CheckpointMean {
  int n = 0;
  MeanWithError mean;
};

// d=2 martingale diagnostic: sample mean of the scalar difference Z_n at each
// checkpoint. Absorbed replicas stay in the sample and contribute 0; the
// martingale property predicts mean = z0 at every checkpoint.
inline std::vector<CheckpointMean> martingale_check(const ModelParams& params, std::int64_t z0,
                                                    const std::vector<int>& checkpoints,
                                                    int replicas, std::uint64_t seed) {
  if (params.d != 2) throw std::invalid_argument("martingale_check: requires d = 2");
  if (z0 < 0) throw std::invalid_argument("martingale_check: z0 must be >= 0");
  int horizon = 0;
  for (int n : checkpoints) horizon = std::max(horizon, n);

  std::vector<std::vector<double>> values(checkpoints.size());
  SpacePoint u(LatticePoint{z0}, 0), v(LatticePoint{0}, 0);
  for (int i = 0; i < replicas; ++i) {
    std::vector<std::int64_t> z_at(checkpoints.size(), 0);
    if (z0 == 0 || horizon == 0) {
      for (std::size_t c = 0; c < checkpoints.size(); ++c) z_at[c] = z0;
    } else {
      auto jt = simulate_pair(params, u, v, horizon, replica_seed(seed, static_cast<std::uint64_t>(i)));
      for (std::size_t c = 0; c < checkpoints.size(); ++c)
        z_at[c] = jt.differences[static_cast<std::size_t>(checkpoints[c])][0];
    }
    for (std::size_t c = 0; c < checkpoints.size(); ++c)
      values[c].push_back(static_cast<double>(z_at[c]));
  }

  std::vector<CheckpointMean> out;
  for (std::size_t c = 0; c < checkpoints.size(); ++c)
    out.push_back({checkpoints[c], mean_with_error(values[c])});
  return out;
}

struct DriftEstimate {
  LatticePoint separation;
  int order = 1;
  MeanWithError estimate;
};

// Monte Carlo estimate of E((||x + A - B||^2 - ||x||^2)^r) where (A, B) are
// the one-step displacements of two walkers at horizontal separation x.
// `independent` replaces the shared environment by two independent ones
// (the T_1-style product-law reference).
inline DriftEstimate drift_moment(const ModelParams& params, const LatticePoint& x, int order,
                                  int replicas, std::uint64_t seed, bool independent = false) {
  if (order < 1 || order > 3) throw std::invalid_argument("drift_moment: order must be in {1,2,3}");
  if (x.is_zero()) throw std::invalid_argument("drift_moment: separation must be nonzero");

  SpacePoint u(x, 0), v(LatticePoint(params.displacement_dim()), 0);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(replicas));
  double x2 = x.l2sq();
  for (int i = 0; i < replicas; ++i) {
    std::uint64_t s = replica_seed(seed, static_cast<std::uint64_t>(i));
    Environment env_u(params, s);
    Environment env_v(params, independent ? mix64(s ^ 0x5eed) : s);
    LatticePoint next = env_u.h_step(u).horiz - env_v.h_step(v).horiz;
    double delta = next.l2sq() - x2;
    double term = 1.0;
    for (int r = 0; r < order; ++r) term *= delta;
    vals.push_back(term);
  }
  return DriftEstimate{x, order, mean_with_error(vals)};
}

struct ReturnSummary {
  std::vector<std::int64_t> excursion_lengths;  // completed excursions only
  std::int64_t excursions_started = 0;
  std::int64_t excursions_returned = 0;
  double returned_fraction = 0.0;
};

// Modified chain: from the origin move deterministically to `restart`; every
// other transition is a fresh shared-environment pair step from the current
// separation (the chain is one-step homogeneous). Runs `replicas` independent
// chains to the horizon, pools their excursions, and reports the fraction of
// started excursions that returned to the origin. A single chain's excursion
// count has a local-time (half-normal scale) law, so pooling is what makes
// the fraction a stable observable.
inline ReturnSummary modified_chain_return(const ModelParams& params, const LatticePoint& restart,
                                           std::int64_t horizon, int replicas, std::uint64_t seed) {
  if (restart.is_zero()) throw std::invalid_argument("modified_chain_return: restart must be nonzero");
  if (replicas < 1) throw std::invalid_argument("modified_chain_return: replicas must be >= 1");

  const int m = params.displacement_dim();
  ReturnSummary rs;
  for (int rep = 0; rep < replicas; ++rep) {
    std::uint64_t chain_seed = replica_seed(seed, static_cast<std::uint64_t>(rep));
    LatticePoint z = restart;  // as if the chain just left the origin
    rs.excursions_started += 1;
    std::int64_t excursion_len = 1;
    for (std::int64_t step = 0; step < horizon; ++step) {
      if (z.is_zero()) {
        rs.excursions_returned += 1;
        rs.excursion_lengths.push_back(excursion_len);
        z = restart;
        rs.excursions_started += 1;
        excursion_len = 1;
        continue;
      }
      Environment env(params, replica_seed(chain_seed, static_cast<std::uint64_t>(step)));
      SpacePoint u(z, 0), v(LatticePoint(m), 0);
      z = env.h_step(u).horiz - env.h_step(v).horiz;
      ++excursion_len;
    }
  }
  rs.returned_fraction = rs.excursions_started > 0
                             ? static_cast<double>(rs.excursions_returned) /
                                   static_cast<double>(rs.excursions_started)
                             : 0.0;
  return rs;
}

}  // namespace drainage
