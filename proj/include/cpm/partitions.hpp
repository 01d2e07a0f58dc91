#pragma once

#include "cpm/rational.hpp"

#include <functional>
#include <vector>

namespace cpm {

/// Block-size profile of a set partition of a k-set: l[i-1] blocks of size i.
struct PartitionProfile {
  std::vector<unsigned> l;
  /// Number of set partitions with this profile: k! / prod_i (i!)^{l_i} l_i!.
  BigInt weight_count;

  unsigned order() const;
  unsigned block_count() const;
};

/// Largest k accepted by the enumeration helpers.
inline constexpr unsigned kMaxEnumerationOrder = 25;

/// Visits every profile of k, lexicographically increasing in (l_1, ..., l_k).
/// Throws DomainError for k > kMaxEnumerationOrder.
void for_each_profile(unsigned k, const std::function<void(const PartitionProfile&)>& visit);

std::vector<PartitionProfile> partition_profiles(unsigned k);

}  // namespace cpm
