#pragma once

#include <cstddef>
#include <vector>

#include "sopg/search_state.hpp"

namespace sopg {

// Capacity-bounded frontier made of one max-heap per depth. Below capacity it
// pops the globally best node; at or above capacity it pops the best node of
// the deepest non-empty heap, so the frontier drains depth-first along the
// longest prefixes instead of growing. Not thread-safe.
class PGQueue {
 public:
  // Heaps cover depths 0..max_len+1; a terminal node for a password of length
  // max_len sits at depth max_len+1 (END counts as a placed token).
  PGQueue(std::size_t capacity, int max_len);

  void push(SearchState state);
  // Throws EmptyQueueError on an empty queue.
  SearchState pop();

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t peak_size() const noexcept { return peak_; }
  int max_len() const noexcept { return max_len_; }

  // Best node at one depth, for inspection; nullptr when that heap is empty.
  const SearchState* top_at(int deep) const;

 private:
  std::size_t capacity_;
  int max_len_;
  std::vector<std::vector<SearchState>> heaps_;
  std::size_t size_ = 0;
  std::size_t peak_ = 0;
};

}  // namespace sopg
