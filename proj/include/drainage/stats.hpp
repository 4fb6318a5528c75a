#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

// Small statistics toolkit: sample moments, normal CDF, Kolmogorov-Smirnov
// distance, chi-square goodness of fit via the regularized incomplete gamma.

namespace drainage {

struct SampleMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

inline SampleMoments sample_moments(const std::vector<double>& xs) {
  SampleMoments sm;
  sm.count = xs.size();
  if (xs.size() < 2) throw std::invalid_argument("sample_moments: need >= 2 values");
  double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  sm.mean = mean;
  sm.variance = m2 * n / (n - 1.0);
  sm.skewness = (m2 > 0) ? m3 / std::pow(m2, 1.5) : 0.0;
  sm.excess_kurtosis = (m2 > 0) ? m4 / (m2 * m2) - 3.0 : 0.0;
  return sm;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// KS distance of a sample against N(mu, sigma^2).
inline double ks_distance_normal(std::vector<double> xs, double mu, double sigma) {
  if (xs.empty()) throw std::invalid_argument("ks_distance_normal: empty sample");
  if (!(sigma > 0)) throw std::invalid_argument("ks_distance_normal: sigma must be > 0");
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = normal_cdf((xs[i] - mu) / sigma);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
  }
  return d;
}

namespace detail {

// Regularized lower incomplete gamma P(a,x); series for x < a+1,
// continued fraction otherwise.
inline double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0) return 0.0;
  double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace detail

// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chi_square_sf(double stat, double df) {
  return 1.0 - detail::gamma_p(df / 2.0, stat / 2.0);
}

struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Pearson GOF of observed counts against expected counts. Cells with
// expected count below min_expected are pooled into their neighbor on the
// right (and the last cell leftward) to keep the approximation honest.
inline ChiSquareResult chi_square_gof(std::vector<double> observed,
                                      std::vector<double> expected,
                                      double min_expected = 5.0) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  std::vector<double> obs, exp;
  double po = 0.0, pe = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    po += observed[i];
    pe += expected[i];
    if (pe >= min_expected) {
      obs.push_back(po);
      exp.push_back(pe);
      po = pe = 0.0;
    }
  }
  if (pe > 0.0) {
    if (obs.empty()) {
      obs.push_back(po);
      exp.push_back(pe);
    } else {
      obs.back() += po;
      exp.back() += pe;
    }
  }
  ChiSquareResult r;
  if (obs.size() < 2) return r;  // nothing to test
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double d = obs[i] - exp[i];
    r.statistic += d * d / exp[i];
  }
  r.df = static_cast<double>(obs.size() - 1);
  r.p_value = chi_square_sf(r.statistic, r.df);
  return r;
}

struct MeanWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

inline MeanWithError mean_with_error(const std::vector<double>& xs) {
  MeanWithError r;
  r.count = xs.size();
  if (xs.empty()) return r;
  double n = static_cast<double>(xs.size());
  for (double x : xs) r.mean += x;
  r.mean /= n;
  if (xs.size() >= 2) {
    double s2 = 0.0;
    for (double x : xs) s2 += (x - r.mean) * (x - r.mean);
    s2 /= (n - 1.0);
    r.std_error = std::sqrt(s2 / n);
  }
  return r;
}

// Binomial proportion with its standard error.
struct ProportionEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
};

inline ProportionEstimate proportion(std::size_t successes, std::size_t trials) {
  ProportionEstimate r;
  r.successes = successes;
  r.trials = trials;
  if (trials == 0) return r;
  double n = static_cast<double>(trials);
  r.value = static_cast<double>(successes) / n;
  r.std_error = std::sqrt(r.value * (1.0 - r.value) / n);
  return r;
}

}  // namespace drainage
