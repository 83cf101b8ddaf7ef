// Copyright 2026 The infucb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INFUCB_ARGMAX_TREE_HPP
#define INFUCB_ARGMAX_TREE_HPP

#include <cstdint>
#include <limits>
#include <vector>

namespace infucb {

/// Tournament tree over a fixed number of slots holding double keys.
/// Point updates and whole-range / sub-range argmax in O(log n); ties go to
/// the lowest slot.
class ArgmaxTree {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  static constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

  ArgmaxTree() = default;
  explicit ArgmaxTree(std::size_t size, double fill = kMinusInf) { reset(size, fill); }

  void reset(std::size_t size, double fill = kMinusInf) {
    size_ = size;
    leaves_ = 1;
    while (leaves_ < size_) {
      leaves_ *= 2;
    }
    keys_.assign(size_, fill);
    winner_.assign(2 * leaves_, npos);
    for (std::size_t i = 0; i < size_; ++i) {
      winner_[leaves_ + i] = i;
    }
    for (std::size_t node = leaves_ - 1; node >= 1; --node) {
      winner_[node] = better(winner_[2 * node], winner_[2 * node + 1]);
    }
  }

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] double key(std::size_t slot) const { return keys_[slot]; }

  void set(std::size_t slot, double key) {
    keys_[slot] = key;
    std::size_t node = (leaves_ + slot) / 2;
    while (node >= 1) {
      winner_[node] = better(winner_[2 * node], winner_[2 * node + 1]);
      node /= 2;
    }
  }

  /// Slot holding the maximum key, or npos when empty.
  [[nodiscard]] std::size_t argmax() const { return size_ == 0 ? npos : winner_[1]; }

  [[nodiscard]] double max_key() const {
    const std::size_t w = argmax();
    return w == npos ? kMinusInf : keys_[w];
  }

  /// Argmax over slots [lo, hi); npos when the range is empty.
  [[nodiscard]] std::size_t argmax(std::size_t lo, std::size_t hi) const {
    std::size_t best_left = npos;
    std::size_t best_right = npos;
    std::size_t l = lo + leaves_;
    std::size_t r = hi + leaves_;
    while (l < r) {
      if (l & 1U) {
        best_left = better(best_left, winner_[l++]);
      }
      if (r & 1U) {
        best_right = better(winner_[--r], best_right);
      }
      l /= 2;
      r /= 2;
    }
    return better(best_left, best_right);
  }

 private:
  [[nodiscard]] std::size_t better(std::size_t a, std::size_t b) const {
    if (a == npos) {
      return b;
    }
    if (b == npos) {
      return a;
    }
    if (keys_[b] > keys_[a]) {
      return b;
    }
    if (keys_[a] > keys_[b]) {
      return a;
    }
    return a < b ? a : b;
  }

  std::size_t size_ = 0;
  std::size_t leaves_ = 1;
  std::vector<double> keys_;
  std::vector<std::size_t> winner_;
};

}  // namespace infucb

#endif  // INFUCB_ARGMAX_TREE_HPP
