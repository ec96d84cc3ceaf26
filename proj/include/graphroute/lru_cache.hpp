/** Copyright 2026 The graphroute Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * 	http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <list>
#include <unordered_map>
#include <utility>

namespace graphroute {

// Byte-bounded least-recently-used cache. Every value carries a byte size
// supplied at insertion; current_bytes() never exceeds capacity_bytes().
// Capacity 0 stores nothing.
template <class Key, class Value, class Hash = std::hash<Key>>
class LruCache {
 public:
  explicit LruCache(std::size_t capacity_bytes) : capacity_(capacity_bytes) {}

  std::size_t capacity_bytes() const noexcept { return capacity_; }
  std::size_t current_bytes() const noexcept { return bytes_; }
  std::size_t size() const noexcept { return map_.size(); }
  std::size_t evictions() const noexcept { return evictions_; }
  bool contains(const Key& k) const { return map_.contains(k); }

  // Returns the cached value and marks it most recently used.
  const Value* get(const Key& k) {
    auto it = map_.find(k);
    if (it == map_.end()) return nullptr;
    order_.splice(order_.begin(), order_, it->second);
    return &it->second->value;
  }

  // Inserts (or replaces) `k`, evicting least-recently-used entries until it
  // fits. Returns false when the value alone exceeds the capacity; any stale
  // copy of `k` is dropped and nothing else is evicted in that case.
  bool put(const Key& k, Value v, std::size_t bytes) {
    if (bytes > capacity_) {
      erase(k);
      return false;
    }
    erase(k);
    while (bytes_ + bytes > capacity_) {
      auto& victim = order_.back();
      bytes_ -= victim.bytes;
      map_.erase(victim.key);
      order_.pop_back();
      ++evictions_;
    }
    order_.push_front(Node{k, std::move(v), bytes});
    map_.emplace(k, order_.begin());
    bytes_ += bytes;
    return true;
  }

  bool erase(const Key& k) {
    auto it = map_.find(k);
    if (it == map_.end()) return false;
    bytes_ -= it->second->bytes;
    order_.erase(it->second);
    map_.erase(it);
    return true;
  }

  void clear() {
    map_.clear();
    order_.clear();
    bytes_ = 0;
  }

  // Keys from most to least recently used.
  template <class F>
  void for_each_mru(F&& f) const {
    for (const auto& n : order_) f(n.key);
  }

 private:
  struct Node {
    Key key;
    Value value;
    std::size_t bytes;
  };

  std::size_t capacity_;
  std::size_t bytes_ = 0;
  std::size_t evictions_ = 0;
  std::list<Node> order_;
  std::unordered_map<Key, typename std::list<Node>::iterator, Hash> map_;
};

}  // namespace graphroute
