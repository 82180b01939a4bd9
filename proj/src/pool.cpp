#include "mkal/pool.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mkal/errors.hpp"

namespace mkal {

PoolState::PoolState(std::size_t num_samples) : num_samples_(num_samples), unlabeled_(num_samples) {
  std::iota(unlabeled_.begin(), unlabeled_.end(), std::size_t{0});
}

bool PoolState::is_unlabeled(std::size_t index) const {
  return std::binary_search(unlabeled_.begin(), unlabeled_.end(), index);
}

void PoolState::mark_labeled(std::size_t index) {
  auto it = std::lower_bound(unlabeled_.begin(), unlabeled_.end(), index);
  if (it == unlabeled_.end() || *it != index)
    throw StateError("sample " + std::to_string(index) + " is not in the unlabeled pool");
  unlabeled_.erase(it);
  labeled_.push_back({index, labeled_.size() + 1});
}

void PoolState::check_invariants() const {
  if (unlabeled_.size() + labeled_.size() != num_samples_)
    throw StateError("pool partition does not cover the sample set");
  std::vector<char> seen(num_samples_, 0);
  for (std::size_t k = 0; k < unlabeled_.size(); ++k) {
    const std::size_t i = unlabeled_[k];
    if (i >= num_samples_ || seen[i]) throw StateError("pool holds an invalid or repeated index");
    if (k > 0 && unlabeled_[k - 1] >= i) throw StateError("pool is not sorted");
    seen[i] = 1;
  }
  for (std::size_t k = 0; k < labeled_.size(); ++k) {
    const auto& e = labeled_[k];
    if (e.index >= num_samples_ || seen[e.index])
      throw StateError("sample " + std::to_string(e.index) + " is both labeled and unlabeled, or queried twice");
    if (e.time != k + 1) throw StateError("labeled set acquisition times are out of order");
    seen[e.index] = 1;
  }
}

}  // namespace mkal
