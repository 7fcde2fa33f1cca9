#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "splitreg/errors.hpp"

namespace splitreg {

/// A partition of predictor indices into disjoint nonempty groups. Indices are
/// 0-based internally; display form is 1-based. Canonical form: each group
/// sorted ascending, groups ordered by their smallest element. Construction
/// canonicalizes, so two partitions with equal group sets compare equal.
class Partition {
 public:
  static Partition of(std::vector<std::vector<int>> groups) {
    if (groups.empty()) throw ParameterError("partition: no groups");
    for (auto& g : groups) {
      if (g.empty()) throw ParameterError("partition: empty group");
      std::sort(g.begin(), g.end());
      for (int v : g)
        if (v < 0) throw ParameterError("partition: negative index");
      for (std::size_t i = 1; i < g.size(); ++i)
        if (g[i] == g[i - 1]) throw ParameterError("partition: repeated index within a group");
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::vector<int> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 1; i < all.size(); ++i)
      if (all[i] == all[i - 1]) throw ParameterError("partition: groups overlap");
    Partition p;
    p.groups_ = std::move(groups);
    return p;
  }

  const std::vector<std::vector<int>>& groups() const { return groups_; }
  int num_groups() const { return static_cast<int>(groups_.size()); }

  int covered_count() const {
    int c = 0;
    for (const auto& g : groups_) c += static_cast<int>(g.size());
    return c;
  }

  int max_index() const {
    int m = -1;
    for (const auto& g : groups_) m = std::max(m, g.back());
    return m;
  }

  /// True when the groups are exactly {0, ..., d-1}.
  bool covers(int d) const { return covered_count() == d && max_index() == d - 1; }

  /// 1-based display, e.g. "{1,3|2}".
  std::string to_string() const {
    std::string s = "{";
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      if (g > 0) s += '|';
      for (std::size_t i = 0; i < groups_[g].size(); ++i) {
        if (i > 0) s += ',';
        s += std::to_string(groups_[g][i] + 1);
      }
    }
    s += '}';
    return s;
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.groups_ == b.groups_;
  }

 private:
  Partition() = default;
  std::vector<std::vector<int>> groups_;
};

}  // namespace splitreg
