#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace incadet {

struct BufferEntry {
    std::string src;
    std::string dst;
    double weight = 0.0;
};

// Persistent store of attack/impact edges: one weight per directed pair,
// latest upsert wins, optional capacity with lowest-weight eviction.
class ReplayBuffer {
  public:
    ReplayBuffer() = default;
    explicit ReplayBuffer(std::optional<std::size_t> capacity);

    void upsert(const std::string& src, const std::string& dst, double weight);
    std::optional<double> weight(const std::string& src, const std::string& dst) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    void clear() { entries_.clear(); }
    const std::optional<std::size_t>& capacity() const { return capacity_; }

    // Entries in (src, dst) lexicographic order, for deterministic iteration.
    std::vector<BufferEntry> entries() const;

    std::string to_json() const;
    static ReplayBuffer from_json(const std::string& text);

    friend bool operator==(const ReplayBuffer& a, const ReplayBuffer& b) {
        return a.capacity_ == b.capacity_ && a.entries_ == b.entries_;
    }

  private:
    void evict_to_capacity();

    std::map<std::pair<std::string, std::string>, double> entries_;
    std::optional<std::size_t> capacity_;
};

}  // namespace incadet
