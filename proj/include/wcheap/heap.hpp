#ifndef WCHEAP_HEAP_HPP
#define WCHEAP_HEAP_HPP

#include <cstdint>
#include <optional>

#include "wcheap/core.hpp"
#include "wcheap/transform.hpp"

namespace wcheap {

namespace detail {
struct Access;

// Internal normalizer: converts and registers roots, runs planned violation
// reductions, then links roots pairwise until a single tree remains.
void find_min_normalize(HeapRecord* h);

// Executes a reduction plan for (l, a, g) increases accumulated by the last
// mutation batch. Full variant: l L-steps, (l + ceil(g/2)) groups of
// {A, G, G}, then a groups of {A, G}; simplified: l L-steps then (a + l)
// A-steps. Inapplicable steps are skipped.
void plan_and_reduce(HeapRecord* h, std::uint64_t l, std::uint64_t a, std::uint64_t g);
}  // namespace detail

// Stable reference to a heap element. Generation-tagged: using a handle whose
// node was consumed by delete_min raises InvalidHandle instead of touching
// freed state.
struct NodeHandle {
    detail::NodeRecord* node = nullptr;
    std::uint64_t generation = 0;

    bool operator==(const NodeHandle&) const = default;
};

// Worst-case bounded decrease-key heap. The full variant supports meld; the
// simplified one trades meld away for less machinery. All operations keep at
// most one tree and restore violation-size bounds before returning.
class Heap {
public:
    explicit Heap(VariantConfig cfg = {});
    ~Heap();
    Heap(Heap&& other) noexcept;
    Heap& operator=(Heap&& other) noexcept;
    Heap(const Heap&) = delete;
    Heap& operator=(const Heap&) = delete;

    NodeHandle insert(std::int64_t value);
    // Deterministic-id insert for replay harnesses; ids below 2^62 never
    // collide with API-assigned ones.
    NodeHandle insert(std::int64_t value, std::uint64_t id);

    // Read-only peek of the current minimum; normalization happens inside
    // the mutators, so this is O(1) and comparison-free.
    std::optional<Key> find_min() const;

    Key delete_min();
    void decrease_key(NodeHandle handle, std::int64_t new_value);

    // Melds both heaps; the smaller one is consumed (its handle object stays
    // valid but every operation on it raises InvalidHeap). Returns the
    // surviving heap. Full variant only.
    static Heap& meld(Heap& h1, Heap& h2);

    std::int64_t size() const;
    bool empty() const { return size() == 0; }
    bool melded_away() const { return melded_; }

    const CostCounters& counters() const;
    const detail::BudgetStats& budget_stats() const;
    const detail::PendingDeltas& last_consumed() const;
    const VariantConfig& config() const;

    Key key_of(NodeHandle handle) const;

private:
    friend struct detail::Access;

    detail::NodeRecord* checked_node(NodeHandle handle) const;
    void require_live() const;

    detail::HeapRecord* rec_ = nullptr;
    bool melded_ = false;
};

namespace detail {
// Test/verification access to the underlying records.
struct Access {
    static HeapRecord* record(Heap& h) { return h.rec_; }
    static const HeapRecord* record(const Heap& h) { return h.rec_; }
    // Places a fresh node on the root list (and node list in the full
    // variant) without normalizing, for scenario construction in tests.
    static NodeHandle raw_insert(Heap& h, std::int64_t value);
    static void normalize(Heap& h) { find_min_normalize(h.rec_); }
};
}  // namespace detail

}  // namespace wcheap

#endif  // WCHEAP_HEAP_HPP
