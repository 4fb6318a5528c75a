#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "drainage/environment.hpp"
#include "drainage/errors.hpp"
#include "drainage/forest_census.hpp"
#include "drainage/stats.hpp"

// Replica machinery for the window statistics S_n (degree counts) and L_n
// (edge-length counts): normality diagnostics of the n^{d/2} scaling, the
// four-term limit variance s^2, and the dependence structure of the degree
// indicator field (one-dependent vertically, mixing horizontally).

namespace drainage {

enum class StatKind { kDegreeCount, kEdgeLengthCount };

struct ReplicaSample {
  ModelParams params;
  int n = 0;
  StatKind kind = StatKind::kDegreeCount;
  std::int64_t index = 0;  // nu for degree counts, l for edge lengths
  std::uint64_t master_seed = 0;
  std::vector<double> values;  // one window statistic per replica
};

// R independent windows with derived seeds, each contributing one statistic.
inline ReplicaSample run_replicas(const ModelParams& params, int n, StatKind kind,
                                  std::int64_t index, int R, std::uint64_t seed) {
  if (R < 100) throw std::invalid_argument("run_replicas: need R >= 100");
  if (kind == StatKind::kDegreeCount && index < 0)
    throw std::invalid_argument("run_replicas: nu must be >= 0");
  if (kind == StatKind::kEdgeLengthCount && index < 1)
    throw std::invalid_argument("run_replicas: l must be >= 1");
  ReplicaSample rs;
  rs.params = params;
  rs.n = n;
  rs.kind = kind;
  rs.index = index;
  rs.master_seed = seed;
  rs.values.reserve(static_cast<std::size_t>(R));
  for (int i = 0; i < R; ++i) {
    ForestWindow w(params, n, replica_seed(seed, static_cast<std::uint64_t>(i)));
    double v = kind == StatKind::kDegreeCount
                   ? static_cast<double>(degree_count(w, static_cast<int>(index)))
                   : static_cast<double>(edge_length_count(w, index));
    rs.values.push_back(v);
  }
  return rs;
}

struct CltThresholds {
  double max_abs_skewness = 0.15;
  double max_abs_excess_kurtosis = 0.3;
  double max_ks_distance = 0.05;
};

struct CltReport {
  std::size_t replicas = 0;
  double mean = 0.0;
  double variance = 0.0;
  double fitted_scale = 0.0;  // sd / n^{d/2}
  std::vector<double> standardized;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_distance = 0.0;
  CltThresholds thresholds;
  bool has_verdict = false;  // verdicts need >= 500 replicas
  bool skewness_ok = false;
  bool kurtosis_ok = false;
  bool ks_ok = false;
  bool normal_verdict = false;
};

inline CltReport normality_report(const ReplicaSample& sample, CltThresholds th = {}) {
  if (sample.values.size() < 2)
    throw std::invalid_argument("normality_report: need >= 2 replicas");
  auto sm = sample_moments(sample.values);
  if (!(sm.variance > 0.0))
    throw DegenerateSample("normality_report: sample variance is zero");

  CltReport rep;
  rep.replicas = sample.values.size();
  rep.mean = sm.mean;
  rep.variance = sm.variance;
  double sd = std::sqrt(sm.variance);
  rep.fitted_scale = sd / std::pow(static_cast<double>(sample.n),
                                   static_cast<double>(sample.params.d) / 2.0);
  rep.standardized.reserve(sample.values.size());
  for (double v : sample.values) rep.standardized.push_back((v - sm.mean) / sd);
  rep.skewness = sm.skewness;
  rep.excess_kurtosis = sm.excess_kurtosis;
  rep.ks_distance = ks_distance_normal(rep.standardized, 0.0, 1.0);
  rep.thresholds = th;
  rep.has_verdict = rep.replicas >= 500;
  rep.skewness_ok = std::abs(rep.skewness) < th.max_abs_skewness;
  rep.kurtosis_ok = std::abs(rep.excess_kurtosis) < th.max_abs_excess_kurtosis;
  rep.ks_ok = rep.ks_distance < th.max_ks_distance;
  rep.normal_verdict = rep.has_verdict && rep.skewness_ok && rep.kurtosis_ok && rep.ks_ok;
  return rep;
}

namespace detail {

// Degree indicator field Y[j][i] over rows j = 1..rows, columns i = 1..cols
// (d = 2): 1 when site (i, j) is open with exactly nu up-edges. Exact via the
// same margin argument as ForestWindow.
inline std::vector<std::vector<std::uint8_t>> indicator_field(const Environment& env, int cols,
                                                              int rows, int nu) {
  const int M = env.search_cap();
  std::unordered_map<SpacePoint, int, SpacePointHash> indeg;
  for (std::int64_t j = 2; j <= rows + 1; ++j)
    for (std::int64_t x = 1 - M; x <= cols + M; ++x) {
      SpacePoint s(LatticePoint{x}, j);
      if (env.is_open(s)) indeg[env.h_step(s)] += 1;
    }
  std::vector<std::vector<std::uint8_t>> y(static_cast<std::size_t>(rows) + 1,
                                           std::vector<std::uint8_t>(static_cast<std::size_t>(cols) + 1, 0));
  for (std::int64_t j = 1; j <= rows; ++j)
    for (std::int64_t x = 1; x <= cols; ++x) {
      SpacePoint s(LatticePoint{x}, j);
      if (!env.is_open(s)) continue;
      auto it = indeg.find(s);
      int k = it == indeg.end() ? 0 : it->second;
      if (k == nu) y[static_cast<std::size_t>(j)][static_cast<std::size_t>(x)] = 1;
    }
  return y;
}

}  // namespace detail

struct S2Estimate {
  double var_term = 0.0;        // Var(Y_{1,1})
  double horizontal_term = 0.0;  // 2 sum_{i=2} Cov(Y_{1,1}, Y_{i,1})
  double up_term = 0.0;          // 2 sum_{i=1} Cov(Y_{1,1}, Y_{i,2})
  double down_term = 0.0;        // 2 sum_{i=2} Cov(Y_{1,2}, Y_{i,1})
  MeanWithError total;           // across replicas
  int lag_cap = 0;
};

// Four-term limit variance of the degree indicator field, sums truncated at
// the lag cap, estimated per replica by translation averaging over one row
// pair and then pooled. d = 2 only.
inline S2Estimate estimate_s2(const ModelParams& params, int n, int nu, int lag_cap, int replicas,
                              std::uint64_t seed) {
  if (params.d != 2) throw std::invalid_argument("estimate_s2: requires d = 2");
  if (lag_cap < 1) throw std::invalid_argument("estimate_s2: lag cap must be >= 1");
  if (n < 4 * lag_cap) throw std::invalid_argument("estimate_s2: need n >= 4 * lag_cap");

  const int base = n - lag_cap;  // translation-averaged base points
  const std::size_t L = static_cast<std::size_t>(lag_cap);
  const std::size_t R = static_cast<std::size_t>(replicas);

  // raw translation-averaged products per replica; the mean-squared part is
  // removed later with leave-one-out cross-replica products, which keeps the
  // estimators exactly unbiased (per-replica centering is biased by O(1/n))
  std::vector<double> a(R), b(R);
  std::vector<std::vector<double>> p11(R), p12(R), p21(R);
  for (std::size_t rep = 0; rep < R; ++rep) {
    Environment env(params, replica_seed(seed, static_cast<std::uint64_t>(rep)));
    auto y = detail::indicator_field(env, n, 2, nu);
    const auto& r1 = y[1];
    const auto& r2 = y[2];
    auto avg_prod = [&](const std::vector<std::uint8_t>& u, const std::vector<std::uint8_t>& v,
                        int t) {
      double s = 0.0;
      for (int i = 1; i <= base; ++i)
        s += static_cast<double>(u[static_cast<std::size_t>(i)]) * v[static_cast<std::size_t>(i + t)];
      return s / base;
    };
    double s1 = 0.0, s2 = 0.0;
    for (int i = 1; i <= base; ++i) {
      s1 += r1[static_cast<std::size_t>(i)];
      s2 += r2[static_cast<std::size_t>(i)];
    }
    a[rep] = s1 / base;
    b[rep] = s2 / base;
    p11[rep].resize(L + 1);
    p12[rep].resize(L + 1);
    p21[rep].resize(L + 1);
    for (int t = 0; t <= lag_cap; ++t) {
      p11[rep][static_cast<std::size_t>(t)] = avg_prod(r1, r1, t);
      p12[rep][static_cast<std::size_t>(t)] = avg_prod(r1, r2, t);
      p21[rep][static_cast<std::size_t>(t)] = avg_prod(r2, r1, t);
    }
  }

  double a_sum = 0.0, b_sum = 0.0;
  for (std::size_t rep = 0; rep < R; ++rep) {
    a_sum += a[rep];
    b_sum += b[rep];
  }

  std::vector<double> totals, t1s, t2s, t3s, t4s;
  for (std::size_t rep = 0; rep < R; ++rep) {
    double a_loo = (a_sum - a[rep]) / static_cast<double>(R - 1);
    double b_loo = (b_sum - b[rep]) / static_cast<double>(R - 1);
    double t1 = p11[rep][0] - a[rep] * a_loo;
    double t2 = 0.0, t3 = 2.0 * (p12[rep][0] - a[rep] * b_loo), t4 = 0.0;
    for (std::size_t t = 1; t <= L; ++t) {
      t2 += 2.0 * (p11[rep][t] - a[rep] * a_loo);
      t3 += 2.0 * (p12[rep][t] - a[rep] * b_loo);
      t4 += 2.0 * (p21[rep][t] - b[rep] * a_loo);
    }
    t1s.push_back(t1);
    t2s.push_back(t2);
    t3s.push_back(t3);
    t4s.push_back(t4);
    totals.push_back(t1 + t2 + t3 + t4);
  }
  S2Estimate est;
  est.var_term = mean_with_error(t1s).mean;
  est.horizontal_term = mean_with_error(t2s).mean;
  est.up_term = mean_with_error(t3s).mean;
  est.down_term = mean_with_error(t4s).mean;
  est.total = mean_with_error(totals);
  est.lag_cap = lag_cap;
  return est;
}

struct CovarianceEntry {
  int lag = 0;
  MeanWithError horizontal;  // Cov(Y_{1,1}, Y_{1+t,1})
  MeanWithError vertical;    // Cov(Y_{1,1}, Y_{1,1+t})
};

struct DependenceTable {
  MeanWithError lag0_variance;  // Var(Y_{1,1})
  std::vector<CovarianceEntry> entries;
};

// Empirical covariance decay of the degree indicator field across horizontal
// and vertical lags, with across-replica standard errors. d = 2 only.
inline DependenceTable dependence_diagnostics(const ModelParams& params, int nu,
                                              const std::vector<int>& lags, int replicas,
                                              std::uint64_t seed) {
  if (params.d != 2) throw std::invalid_argument("dependence_diagnostics: requires d = 2");
  int max_lag = 0;
  for (int t : lags) {
    if (t < 1 || t > 64)
      throw std::invalid_argument("dependence_diagnostics: lags must lie in [1, 64]");
    max_lag = std::max(max_lag, t);
  }
  const int cols = 4 * std::max(max_lag, 16);
  const int rows = max_lag + 1;
  const int base = cols - max_lag;

  // raw products per replica; mean-squared parts removed with leave-one-out
  // cross-replica products so every estimator is exactly unbiased
  const std::size_t R = static_cast<std::size_t>(replicas);
  std::vector<double> m1(R);
  std::vector<std::vector<double>> mj(lags.size(), std::vector<double>(R));
  std::vector<std::vector<double>> ph(lags.size(), std::vector<double>(R));
  std::vector<std::vector<double>> pv(lags.size(), std::vector<double>(R));
  for (std::size_t rep = 0; rep < R; ++rep) {
    Environment env(params, replica_seed(seed, static_cast<std::uint64_t>(rep)));
    auto y = detail::indicator_field(env, cols, rows, nu);

    auto row_mean = [&](int j) {
      double s = 0.0;
      for (int i = 1; i <= base; ++i) s += y[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      return s / base;
    };
    m1[rep] = row_mean(1);
    for (std::size_t k = 0; k < lags.size(); ++k) {
      int t = lags[k];
      mj[k][rep] = row_mean(1 + t);
      double h = 0.0, vv = 0.0;
      for (int i = 1; i <= base; ++i) {
        h += static_cast<double>(y[1][static_cast<std::size_t>(i)]) *
             y[1][static_cast<std::size_t>(i + t)];
        vv += static_cast<double>(y[1][static_cast<std::size_t>(i)]) *
              y[static_cast<std::size_t>(1 + t)][static_cast<std::size_t>(i)];
      }
      ph[k][rep] = h / base;
      pv[k][rep] = vv / base;
    }
  }

  double m1_sum = 0.0;
  for (std::size_t rep = 0; rep < R; ++rep) m1_sum += m1[rep];
  std::vector<double> mj_sum(lags.size(), 0.0);
  for (std::size_t k = 0; k < lags.size(); ++k)
    for (std::size_t rep = 0; rep < R; ++rep) mj_sum[k] += mj[k][rep];

  std::vector<double> var0;
  std::vector<std::vector<double>> hcov(lags.size()), vcov(lags.size());
  for (std::size_t rep = 0; rep < R; ++rep) {
    double m1_loo = (m1_sum - m1[rep]) / static_cast<double>(R - 1);
    var0.push_back(m1[rep] - m1[rep] * m1_loo);  // E Y^2 = E Y for indicators
    for (std::size_t k = 0; k < lags.size(); ++k) {
      double mj_loo = (mj_sum[k] - mj[k][rep]) / static_cast<double>(R - 1);
      hcov[k].push_back(ph[k][rep] - m1[rep] * m1_loo);
      vcov[k].push_back(pv[k][rep] - m1[rep] * mj_loo);
    }
  }
  DependenceTable table;
  table.lag0_variance = mean_with_error(var0);
  for (std::size_t k = 0; k < lags.size(); ++k) {
    CovarianceEntry e;
    e.lag = lags[k];
    e.horizontal = mean_with_error(hcov[k]);
    e.vertical = mean_with_error(vcov[k]);
    table.entries.push_back(e);
  }
  return table;
}

}  // namespace drainage
