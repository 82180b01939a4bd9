#pragma once

#include <cstddef>
#include <vector>

namespace mkal {

struct LabeledEntry {
  std::size_t index;
  std::size_t time;  // 1-based iteration at which the label was acquired
};

/// Partition of sample indices 0..M-1 into the unlabeled pool and the
/// labeled set, in acquisition order.
class PoolState {
 public:
  explicit PoolState(std::size_t num_samples);

  std::size_t num_samples() const noexcept { return num_samples_; }
  /// Sorted ascending.
  const std::vector<std::size_t>& unlabeled() const noexcept { return unlabeled_; }
  const std::vector<LabeledEntry>& labeled() const noexcept { return labeled_; }
  bool empty() const noexcept { return unlabeled_.empty(); }
  bool is_unlabeled(std::size_t index) const;

  /// Moves `index` from the pool to the labeled set with time |labeled| + 1.
  /// Throws StateError if the index is not in the pool.
  void mark_labeled(std::size_t index);

  /// Throws StateError if the partition is broken: overlap, a missing or
  /// duplicated index, or acquisition times that are not 1..t in order.
  void check_invariants() const;

 private:
  std::size_t num_samples_;
  std::vector<std::size_t> unlabeled_;
  std::vector<LabeledEntry> labeled_;
};

}  // namespace mkal
