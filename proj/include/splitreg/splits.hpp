#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "splitreg/errors.hpp"
#include "splitreg/partition.hpp"

namespace splitreg {

/// An exact partition count. Values grow super-exponentially, hence the
/// arbitrary-precision integer.
struct SplitCount {
  int p = 0;
  int groups = 0;
  mpz_class value;
};

namespace detail {

inline void check_count_args(int p, int groups, const char* name) {
  if (p < 1) throw ParameterError(std::string(name) + ": p must be >= 1");
  if (groups < 1 || groups > p)
    throw ParameterError(std::string(name) + ": groups must lie in [1, p]");
}

/// Sums p! / (prod sizes_g! * prod multiplicity(h)!) over all nondecreasing
/// compositions of p into `groups` positive parts. Each composition term counts
/// the distinct ways to split p labeled items into unlabeled groups of those sizes.
inline void composition_sum(int p, int groups, int min_part, int remaining, std::vector<int>& parts,
                            mpz_class& total) {
  if (static_cast<int>(parts.size()) == groups) {
    if (remaining != 0) return;
    mpz_class term;
    mpz_fac_ui(term.get_mpz_t(), static_cast<unsigned long>(p));
    mpz_class fac;
    for (int s : parts) {
      mpz_fac_ui(fac.get_mpz_t(), static_cast<unsigned long>(s));
      term /= fac;
    }
    int run = 1;
    for (std::size_t i = 1; i <= parts.size(); ++i) {
      if (i < parts.size() && parts[i] == parts[i - 1]) {
        ++run;
      } else {
        mpz_fac_ui(fac.get_mpz_t(), static_cast<unsigned long>(run));
        term /= fac;
        run = 1;
      }
    }
    total += term;
    return;
  }
  int slots_left = groups - static_cast<int>(parts.size());
  for (int next = min_part; next * slots_left <= remaining; ++next) {
    parts.push_back(next);
    composition_sum(p, groups, next, remaining - next, parts, total);
    parts.pop_back();
  }
}

}  // namespace detail

/// Number of ways to partition p predictors into exactly `groups` nonempty,
/// unlabeled groups (every predictor used).
inline SplitCount count_splits(int p, int groups) {
  detail::check_count_args(p, groups, "count_splits");
  mpz_class total = 0;
  std::vector<int> parts;
  detail::composition_sum(p, groups, 1, p, parts, total);
  return SplitCount{p, groups, total};
}

/// Same, but predictors may also be left out entirely: sums over the choice of
/// j >= groups predictors kept, times the count of full splits of those j.
inline SplitCount count_splits_with_leftout(int p, int groups) {
  detail::check_count_args(p, groups, "count_splits_with_leftout");
  mpz_class total = 0;
  for (int j = groups; j <= p; ++j) {
    mpz_class choose;
    mpz_bin_uiui(choose.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(j));
    total += choose * count_splits(j, groups).value;
  }
  return SplitCount{p, groups, total};
}

namespace detail {

inline void check_cap(const mpz_class& count, long long cap, const char* name) {
  if (cap < 1) throw ParameterError(std::string(name) + ": cap must be >= 1");
  if (count > mpz_class(static_cast<long>(cap)))
    throw TooManySplitsError(std::string(name) + ": " + count.get_str() +
                                 " partitions exceed the cap of " + std::to_string(cap),
                             count.get_str(), cap);
}

/// Emits every partition of {0..p-1} into exactly `groups` groups by extending
/// label assignments: item i may join any group opened so far or open a new one
/// while fewer than `groups` exist. The emission order is lexicographic in the
/// label strings, which lists each partition once, in canonical form.
inline void enumerate_labelled(int p, int groups, int item, int used, std::vector<int>& labels,
                               std::vector<Partition>& out) {
  if (item == p) {
    if (used != groups) return;
    std::vector<std::vector<int>> gs(groups);
    for (int i = 0; i < p; ++i) gs[labels[i]].push_back(i);
    out.push_back(Partition::of(std::move(gs)));
    return;
  }
  // Pruning: the remaining items must be able to open the missing groups.
  if (used + (p - item) < groups) return;
  int limit = used < groups ? used : groups - 1;
  for (int g = 0; g <= limit; ++g) {
    labels[item] = g;
    enumerate_labelled(p, groups, item + 1, g == used ? used + 1 : used, labels, out);
  }
}

}  // namespace detail

/// Materializes every split of p predictors into exactly `groups` groups, in a
/// deterministic canonical order. Refuses (with the exact count in the error)
/// when the count exceeds `cap`.
inline std::vector<Partition> enumerate_splits(int p, int groups, long long cap = 10'000'000) {
  detail::check_count_args(p, groups, "enumerate_splits");
  SplitCount count = count_splits(p, groups);
  detail::check_cap(count.value, cap, "enumerate_splits");
  std::vector<Partition> out;
  std::vector<int> labels(p, 0);
  detail::enumerate_labelled(p, groups, 0, 0, labels, out);
  return out;
}

/// The candidate set searched by the adaptive split estimator: the single-group
/// split plus every split into 2..max_groups groups. Ordered by group count,
/// then canonically within each count.
inline std::vector<Partition> adaptive_split_set(int p, int max_groups,
                                                 long long cap = 10'000'000) {
  detail::check_count_args(p, max_groups, "adaptive_split_set");
  mpz_class total = 1;
  for (int g = 2; g <= max_groups; ++g) total += count_splits(p, g).value;
  detail::check_cap(total, cap, "adaptive_split_set");
  std::vector<Partition> out;
  std::vector<int> everything(p);
  for (int i = 0; i < p; ++i) everything[i] = i;
  out.push_back(Partition::of({everything}));
  for (int g = 2; g <= max_groups; ++g) {
    std::vector<Partition> level = enumerate_splits(p, g, cap);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace splitreg
