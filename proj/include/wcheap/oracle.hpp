#ifndef WCHEAP_ORACLE_HPP
#define WCHEAP_ORACLE_HPP

#include <optional>
#include <set>
#include <unordered_map>
#include <utility>

#include "wcheap/types.hpp"

namespace wcheap {

// Brute-force reference model: a sorted set of (value, id) pairs with the
// same tiebreak ids as the heap under test. Deliberately shares no code with
// the heap implementation.
class OracleHeap {
public:
    void insert(std::int64_t value, std::uint64_t id) {
        items_.emplace(value, id);
        value_of_[id] = value;
    }

    std::optional<Key> find_min() const {
        if (items_.empty()) return std::nullopt;
        auto it = items_.begin();
        return Key{it->first, it->second};
    }

    Key delete_min() {
        if (items_.empty()) throw Error(Error::Code::EmptyHeap, "oracle: empty");
        auto it = items_.begin();
        Key out{it->first, it->second};
        value_of_.erase(it->second);
        items_.erase(it);
        return out;
    }

    void decrease_key(std::uint64_t id, std::int64_t new_value) {
        auto it = value_of_.find(id);
        if (it == value_of_.end()) throw Error(Error::Code::InvalidHandle, "oracle: no such id");
        if (new_value >= it->second)
            throw Error(Error::Code::KeyIncrease, "oracle: not a decrease");
        items_.erase({it->second, id});
        items_.emplace(new_value, id);
        it->second = new_value;
    }

    void meld_from(OracleHeap& other) {
        items_.merge(other.items_);
        for (auto& [id, v] : other.value_of_) value_of_.emplace(id, v);
        other.items_.clear();
        other.value_of_.clear();
    }

    std::size_t size() const { return items_.size(); }
    bool contains(std::uint64_t id) const { return value_of_.count(id) != 0; }
    std::int64_t value_of(std::uint64_t id) const { return value_of_.at(id); }

private:
    std::set<std::pair<std::int64_t, std::uint64_t>> items_;
    std::unordered_map<std::uint64_t, std::int64_t> value_of_;
};

}  // namespace wcheap

#endif  // WCHEAP_ORACLE_HPP
