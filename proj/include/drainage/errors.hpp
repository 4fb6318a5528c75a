#pragma once

#include <stdexcept>
#include <string>

namespace drainage {

// Thrown when a nearest-open-site search exceeds its shell cap. With the
// default caps this has probability below 1e-15 per query, so it is treated
// as a hard error rather than silently resampled.
class SearchExhausted : public std::runtime_error {
 public:
  explicit SearchExhausted(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an experiment would exceed its configured step budget
// (e.g. n^4-step coupling probes with n too large).
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a statistic requires sample variation and the sample is
// constant (e.g. standardizing an all-equal replica set).
class DegenerateSample : public std::runtime_error {
 public:
  explicit DegenerateSample(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace drainage
