#include "incadet/replay.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace incadet {

ReplayBuffer::ReplayBuffer(std::optional<std::size_t> capacity) : capacity_(capacity) {
    if (capacity_ && *capacity_ == 0) throw std::invalid_argument("buffer capacity must be positive");
}

void ReplayBuffer::upsert(const std::string& src, const std::string& dst, double weight) {
    if (!std::isfinite(weight)) throw std::invalid_argument("buffer weight must be finite");
    entries_[{src, dst}] = weight;
    evict_to_capacity();
}

std::optional<double> ReplayBuffer::weight(const std::string& src, const std::string& dst) const {
    const auto it = entries_.find({src, dst});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<BufferEntry> ReplayBuffer::entries() const {
    std::vector<BufferEntry> out;
    out.reserve(entries_.size());
    for (const auto& [key, w] : entries_) out.push_back({key.first, key.second, w});
    return out;
}

void ReplayBuffer::evict_to_capacity() {
    if (!capacity_) return;
    while (entries_.size() > *capacity_) {
        auto lowest = entries_.begin();
        for (auto it = entries_.begin(); it != entries_.end(); ++it) {
            if (std::abs(it->second) < std::abs(lowest->second)) lowest = it;
        }
        entries_.erase(lowest);
    }
}

std::string ReplayBuffer::to_json() const {
    nlohmann::json j;
    j["capacity"] = capacity_ ? nlohmann::json(*capacity_) : nlohmann::json(nullptr);
    j["entries"] = nlohmann::json::array();
    for (const BufferEntry& e : entries()) {
        j["entries"].push_back({{"src", e.src}, {"dst", e.dst}, {"weight", e.weight}});
    }
    return j.dump(2);
}

ReplayBuffer ReplayBuffer::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ReplayBuffer buffer;
    if (!j.at("capacity").is_null()) {
        buffer.capacity_ = j.at("capacity").get<std::size_t>();
        if (*buffer.capacity_ == 0) throw std::invalid_argument("buffer capacity must be positive");
    }
    for (const auto& e : j.at("entries")) {
        buffer.entries_[{e.at("src").get<std::string>(), e.at("dst").get<std::string>()}] =
            e.at("weight").get<double>();
    }
    buffer.evict_to_capacity();
    return buffer;
}

}  // namespace incadet
