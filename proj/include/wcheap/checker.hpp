#ifndef WCHEAP_CHECKER_HPP
#define WCHEAP_CHECKER_HPP

#include <string>
#include <vector>

#include "wcheap/heap.hpp"

namespace wcheap {

// Full-forest audit: every structural, bookkeeping and bound invariant the
// heap is supposed to maintain, verified by traversal. Read-only and
// independent of the hot-path bookkeeping (integer ranks are recomputed by
// walking the rank list, the loss sum is re-added from the nodes).
struct InvariantReport {
    struct Item {
        std::string name;
        bool pass = true;
        std::string detail;  // first failure within this invariant
    };

    std::vector<Item> items;

    bool ok() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }

    std::string first_failure() const {
        for (const auto& it : items)
            if (!it.pass) return it.name + ": " + it.detail;
        return {};
    }

    bool passed(const std::string& name) const {
        for (const auto& it : items)
            if (it.name == name) return it.pass;
        return false;
    }
};

InvariantReport check_invariants(const Heap& heap);

}  // namespace wcheap

#endif  // WCHEAP_CHECKER_HPP
