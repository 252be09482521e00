#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace flockwalk {

// Open-addressing set of node ids (linear probing, load <= 1/2).
// One per walker, so it is kept to a single vector of slots.
class VisitedSet {
public:
    static constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

    /// Returns true if the id was not present.
    bool insert(std::uint32_t id) {
        if ((size_ + 1) * 2 > slots_.size()) grow();
        if (place(slots_, id)) {
            ++size_;
            return true;
        }
        return false;
    }

    bool contains(std::uint32_t id) const {
        if (slots_.empty()) return false;
        const std::size_t mask = slots_.size() - 1;
        for (std::size_t i = hash(id) & mask;; i = (i + 1) & mask) {
            if (slots_[i] == id) return true;
            if (slots_[i] == kEmpty) return false;
        }
    }

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    void clear() {
        slots_.clear();
        size_ = 0;
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::uint32_t s : slots_)
            if (s != kEmpty) f(s);
    }

    bool operator==(const VisitedSet& other) const {
        if (size_ != other.size_) return false;
        for (std::uint32_t s : slots_)
            if (s != kEmpty && !other.contains(s)) return false;
        return true;
    }

private:
    static std::size_t hash(std::uint32_t id) {
        return static_cast<std::size_t>((static_cast<std::uint64_t>(id) * 0x9E3779B97F4A7C15ULL) >> 32);
    }

    static bool place(std::vector<std::uint32_t>& slots, std::uint32_t id) {
        const std::size_t mask = slots.size() - 1;
        for (std::size_t i = hash(id) & mask;; i = (i + 1) & mask) {
            if (slots[i] == id) return false;
            if (slots[i] == kEmpty) {
                slots[i] = id;
                return true;
            }
        }
    }

    void grow() {
        std::vector<std::uint32_t> bigger(slots_.empty() ? 8 : slots_.size() * 2, kEmpty);
        for (std::uint32_t s : slots_)
            if (s != kEmpty) place(bigger, s);
        slots_.swap(bigger);
    }

    std::vector<std::uint32_t> slots_;
    std::size_t size_ = 0;
};

}  // namespace flockwalk
