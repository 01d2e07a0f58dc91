#include "cpm/partitions.hpp"

#include "cpm/error.hpp"

#include <numeric>

namespace cpm {

unsigned PartitionProfile::order() const {
  unsigned k = 0;
  for (std::size_t i = 0; i < l.size(); ++i) k += static_cast<unsigned>(i + 1) * l[i];
  return k;
}

unsigned PartitionProfile::block_count() const { return std::accumulate(l.begin(), l.end(), 0u); }

namespace {

struct Enumerator {
  unsigned k;
  std::vector<BigInt> fact;
  PartitionProfile current;
  const std::function<void(const PartitionProfile&)>& visit;

  void emit() {
    BigInt denom = 1;
    for (unsigned i = 1; i <= k; ++i) {
      const unsigned li = current.l[i - 1];
      for (unsigned r = 0; r < li; ++r) denom *= fact[i];
      denom *= fact[li];
    }
    current.weight_count = fact[k] / denom;
    visit(current);
  }

  // Assign l_i for part size i given `remaining` still to cover.
  void assign(unsigned i, unsigned remaining) {
    if (remaining == 0) {
      for (unsigned j = i; j <= k; ++j) current.l[j - 1] = 0;
      emit();
      return;
    }
    if (i > remaining) return;  // larger parts cannot fill the remainder
    for (unsigned c = 0; c * i <= remaining; ++c) {
      current.l[i - 1] = c;
      assign(i + 1, remaining - c * i);
    }
  }
};

}  // namespace

void for_each_profile(unsigned k, const std::function<void(const PartitionProfile&)>& visit) {
  if (k > kMaxEnumerationOrder) {
    throw DomainError("partitions: order " + std::to_string(k) + " exceeds enumeration cap " +
                      std::to_string(kMaxEnumerationOrder));
  }
  Enumerator e{k, {}, {}, visit};
  e.fact.reserve(k + 1);
  for (unsigned i = 0; i <= k; ++i) e.fact.push_back(factorial(i));
  e.current.l.assign(k, 0);
  if (k == 0) {
    e.current.weight_count = 1;
    visit(e.current);
    return;
  }
  e.assign(1, k);
}

std::vector<PartitionProfile> partition_profiles(unsigned k) {
  std::vector<PartitionProfile> out;
  for_each_profile(k, [&](const PartitionProfile& p) { out.push_back(p); });
  return out;
}

}  // namespace cpm
