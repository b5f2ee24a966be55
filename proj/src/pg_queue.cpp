#include "sopg/pg_queue.hpp"

#include <algorithm>

#include "sopg/error.hpp"

namespace sopg {

PGQueue::PGQueue(std::size_t capacity, int max_len)
    : capacity_(capacity), max_len_(max_len), heaps_(static_cast<std::size_t>(max_len) + 2) {
  if (capacity == 0) throw ConfigError("frontier capacity must be >= 1");
  if (max_len < 0 || max_len > kMaxLenLimit) throw ConfigError("max_len out of range");
}

void PGQueue::push(SearchState state) {
  if (state.deep < 0 || state.deep > max_len_ + 1) throw ConfigError("state depth outside the frontier");
  auto& heap = heaps_[static_cast<std::size_t>(state.deep)];
  heap.push_back(std::move(state));
  std::push_heap(heap.begin(), heap.end(), StateLess{});
  peak_ = std::max(peak_, ++size_);
}

SearchState PGQueue::pop() {
  if (size_ == 0) throw EmptyQueueError("pop from an empty frontier");
  std::vector<SearchState>* chosen = nullptr;
  if (size_ < capacity_) {
    for (auto& heap : heaps_)
      if (!heap.empty() && (chosen == nullptr || compare_states(heap.front(), chosen->front()) > 0))
        chosen = &heap;
  } else {
    for (auto it = heaps_.rbegin(); it != heaps_.rend(); ++it)
      if (!it->empty()) {
        chosen = &*it;
        break;
      }
  }
  std::pop_heap(chosen->begin(), chosen->end(), StateLess{});
  SearchState out = std::move(chosen->back());
  chosen->pop_back();
  --size_;
  return out;
}

const SearchState* PGQueue::top_at(int deep) const {
  if (deep < 0 || deep >= static_cast<int>(heaps_.size())) return nullptr;
  const auto& heap = heaps_[static_cast<std::size_t>(deep)];
  return heap.empty() ? nullptr : &heap.front();
}

}  // namespace sopg
