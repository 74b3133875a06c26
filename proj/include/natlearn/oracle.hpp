#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "natlearn/dataset.hpp"
#include "natlearn/error.hpp"
#include "natlearn/parallel.hpp"
#include "natlearn/predict.hpp"

namespace natlearn {

/// Size guard for exhaustive search. Exceeding it is an error, never a
/// silent sample-down.
struct OracleLimits {
  std::size_t max_n = 20;
  std::size_t max_p = 12;
};

/// Best (s, o, subset) found by exhaustive search. s is a class-0 row, o a
/// class-1 row (0-based indices into the searched dataset).
struct OracleResult {
  std::size_t s = 0;
  std::size_t o = 0;
  FeatureSet subset;
  std::size_t error = 0;
  std::size_t ties = 0;  // solutions sharing the minimal error and subset size
};

namespace detail {

inline std::vector<FeatureSet> subsets_of_size(std::size_t p, std::size_t k) {
  std::vector<FeatureSet> out;
  FeatureSet cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == p - k + (i - 1)) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

struct OracleBest {
  bool any = false;
  OracleResult r;

  void offer(std::size_t error, std::size_t s, std::size_t o, const FeatureSet& subset) {
    if (any && error > r.error) return;
    if (any && error == r.error) {
      ++r.ties;
      if (std::tie(s, o, subset) < std::tie(r.s, r.o, r.subset)) {
        r.s = s;
        r.o = o;
        r.subset = subset;
      }
      return;
    }
    any = true;
    r = OracleResult{s, o, subset, error, 1};
  }

  void merge(const OracleBest& other) {
    if (!other.any) return;
    if (!any || other.r.error < r.error) {
      *this = other;
      return;
    }
    if (other.r.error > r.error) return;
    const std::size_t ties = r.ties + other.r.ties;
    if (std::tie(other.r.s, other.r.o, other.r.subset) < std::tie(r.s, r.o, r.subset)) r = other.r;
    r.ties = ties;
  }
};

}  // namespace detail

/// Exhaustive search over every cross-class pair and every feature subset
/// with min_subset <= |subset| <= max_subset, scoring each by
/// nearest-prototype errors over the whole dataset. Optima are ordered by
/// error, then subset size, then (s, o, subset) lexicographically.
inline OracleResult oracle_search(const Dataset& ds, std::size_t min_subset, std::size_t max_subset,
                                  OracleLimits limits = {}, std::size_t threads = 1) {
  if (ds.n() > limits.max_n || ds.p() > limits.max_p) {
    throw OracleGuardError("exhaustive search limited to n <= " + std::to_string(limits.max_n) + " and p <= " +
                           std::to_string(limits.max_p) + "; got n = " + std::to_string(ds.n()) +
                           ", p = " + std::to_string(ds.p()));
  }
  if (min_subset < 1 || min_subset > max_subset || max_subset > ds.p()) {
    throw ContractError("subset sizes must satisfy 1 <= min <= max <= p");
  }
  std::vector<std::size_t> class0;
  std::vector<std::size_t> class1;
  for (std::size_t i = 0; i < ds.n(); ++i) (ds.label(i) == 0 ? class0 : class1).push_back(i);
  if (class0.empty() || class1.empty()) throw ClassSizeError("both classes are required");

  detail::OracleBest best;
  for (std::size_t k = min_subset; k <= max_subset; ++k) {
    const auto subsets = detail::subsets_of_size(ds.p(), k);
    std::vector<detail::OracleBest> partial(std::max<std::size_t>(1, std::min(resolve_threads(threads), subsets.size())));
    parallel_chunks(subsets.size(), partial.size(), [&](std::size_t w, std::size_t begin, std::size_t end) {
      std::vector<double> proj(ds.n() * k);
      for (std::size_t q = begin; q < end; ++q) {
        const auto& subset = subsets[q];
        for (std::size_t i = 0; i < ds.n(); ++i) {
          for (std::size_t c = 0; c < k; ++c) proj[i * k + c] = ds.at(i, subset[c]);
        }
        for (std::size_t s : class0) {
          for (std::size_t o : class1) {
            std::size_t error = 0;
            for (std::size_t i = 0; i < ds.n(); ++i) {
              const double* x = proj.data() + i * k;
              const auto pred = decide(aligned_distance(x, proj.data() + s * k, k),
                                       aligned_distance(x, proj.data() + o * k, k), 0, 1);
              if (pred.label != ds.label(i)) ++error;
            }
            partial[w].offer(error, s, o, subset);
          }
        }
      }
    });
    detail::OracleBest level;
    for (const auto& part : partial) level.merge(part);
    // Smaller subsets were enumerated first, so only a strictly lower error
    // displaces an earlier size.
    if (!best.any || level.r.error < best.r.error) best = level;
  }
  return best.r;
}

}  // namespace natlearn
