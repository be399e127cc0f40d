#ifndef WCHEAP_CORE_HPP
#define WCHEAP_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <memory>

#include "wcheap/intrusive_list.hpp"
#include "wcheap/types.hpp"

namespace wcheap::detail {

struct NodeRecord;
struct RankEntry;
struct HeapRecord;
struct ViolationEntry;
struct ViolationList;

// Stored node state. Being a tree root or being implicitly deferred (the
// node's rank entry belongs to a heap record with negative size) overrides it.
enum class NodeState : std::uint8_t {
    SolidRankChild,
    SolidNonrankChild,
    ExplicitDeferred,
};

enum class VType : std::uint8_t { A = 0, G = 1, L = 2 };

enum class EdgeKind : std::uint8_t { RankEdge, NonrankSolid, Deferred };

enum class DecrementCause : std::uint8_t { ChildRemoval, ChildConversion };

struct NodeRecord {
    Key key;
    NodeState state = NodeState::SolidNonrankChild;
    std::uint32_t loss = 0;
    RankEntry* rank = nullptr;
    NodeRecord* parent = nullptr;

    // Sibling links: child list of the parent, or the heap root list.
    NodeRecord* sib_left = nullptr;
    NodeRecord* sib_right = nullptr;
    NodeRecord* child_head = nullptr;  // leftmost child

    // Global node list (full variant).
    NodeRecord* nl_left = nullptr;
    NodeRecord* nl_right = nullptr;

    ViolationEntry* violation = nullptr;

    // Slot management (see NodePool).
    std::uint64_t generation = 0;
    bool live = false;
    NodeRecord* next_free = nullptr;
};

struct SiblingLinks {
    static NodeRecord*& left(NodeRecord* n) { return n->sib_left; }
    static NodeRecord*& right(NodeRecord* n) { return n->sib_right; }
};
struct NodeListLinks {
    static NodeRecord*& left(NodeRecord* n) { return n->nl_left; }
    static NodeRecord*& right(NodeRecord* n) { return n->nl_right; }
};

using SiblingList = IntrusiveList<NodeRecord, SiblingLinks>;
using NodeList = IntrusiveList<NodeRecord, NodeListLinks>;

// A child list is owned by its parent node; wrap the head pointer on demand.
inline SiblingList child_list(NodeRecord* parent) {
    SiblingList l;
    l.head = parent->child_head;
    return l;
}

// One rank value of a heap-private rank list. refcount = number of nodes
// whose rank handle is this entry, plus 1 if a successor entry exists.
// `index` is the integer rank; entries are created only at the tail and the
// list only shrinks at the tail, so the index never changes.
struct RankEntry {
    std::uint64_t refcount = 0;
    std::uint32_t index = 0;
    RankEntry* prev = nullptr;
    RankEntry* next = nullptr;
    HeapRecord* heap = nullptr;
    ViolationEntry* anchor[3] = {nullptr, nullptr, nullptr};  // p^A, p^G, p^L
};

// Membership token in one violation list. `rank_entry` is the rank the entry
// was filed under; null for entries in L's unorganized loss>=2 segment.
struct ViolationEntry {
    VType vtype = VType::A;
    NodeRecord* node = nullptr;
    RankEntry* rank_entry = nullptr;
    ViolationEntry* left = nullptr;
    ViolationEntry* right = nullptr;
    ViolationList* list = nullptr;
};

struct ViolationLinks {
    static ViolationEntry*& left(ViolationEntry* e) { return e->left; }
    static ViolationEntry*& right(ViolationEntry* e) { return e->right; }
};
using VEntryList = IntrusiveList<ViolationEntry, ViolationLinks>;

// A violation list. Entries in `organized` are keyed by rank with the
// pair-at-right-end discipline; `unorganized` is L's loss>=2 segment (unused
// for A and G). The leftmost unorganized entry is the segment boundary.
struct ViolationList {
    VType vtype = VType::A;
    HeapRecord* heap = nullptr;
    VEntryList organized;
    VEntryList unorganized;
    std::size_t size = 0;
};

// Chunked slab allocator for nodes. Slot addresses are stable for the life
// of the pool and generations survive reuse, so stale handles are detected
// instead of dereferencing freed memory. Pools of melded heaps are spliced
// into the surviving heap in O(1).
class NodePool {
public:
    static constexpr std::size_t kChunkSize = 256;

    NodePool() = default;
    NodePool(const NodePool&) = delete;
    NodePool& operator=(const NodePool&) = delete;
    ~NodePool();

    NodeRecord* alloc();
    void release(NodeRecord* n);  // bumps generation, pushes to free list
    void splice_from(NodePool& other);  // O(1)

    template <class Fn>
    void for_each_live(Fn&& fn) {
        for (Chunk* c = chunks_; c; c = c->next)
            for (std::size_t i = 0; i < c->used; ++i)
                if (c->slots[i].live) fn(&c->slots[i]);
    }

private:
    struct Chunk {
        Chunk* next = nullptr;
        std::size_t used = 0;
        std::unique_ptr<NodeRecord[]> slots;
    };

    Chunk* chunks_ = nullptr;
    Chunk* chunks_tail_ = nullptr;
    NodeRecord* free_head_ = nullptr;
    NodeRecord* free_tail_ = nullptr;
};

struct PendingDeltas {
    std::uint64_t l = 0;  // increases of the loss sum
    std::uint64_t a = 0;  // increases of |A|
    std::uint64_t g = 0;  // increases of |G|
};

// Running totals the verification layer reads. Budget checks are evaluated
// inline so a violation anywhere in a long fuzz run is never missed.
struct BudgetStats {
    std::uint64_t plan_calls = 0;
    std::uint64_t plan_budget_violations = 0;
    std::uint64_t steps_applied[4] = {0, 0, 0, 0};  // degree, A, G, L
    std::uint64_t step_budget_violations = 0;
    std::uint64_t max_plan_comparisons = 0;

    // Meld folds the consumed heap's stats into the survivor so totals cover
    // the whole run.
    void absorb(const BudgetStats& other) {
        plan_calls += other.plan_calls;
        plan_budget_violations += other.plan_budget_violations;
        for (int i = 0; i < 4; ++i) steps_applied[i] += other.steps_applied[i];
        step_budget_violations += other.step_budget_violations;
        if (other.max_plan_comparisons > max_plan_comparisons)
            max_plan_comparisons = other.max_plan_comparisons;
    }
};

struct HeapRecord {
    std::int64_t size = 0;  // node count; negative means melded away
    VariantConfig cfg;

    RankEntry* rank_head = nullptr;
    RankEntry* rank_tail = nullptr;
    SiblingList root_list;
    NodeList node_list;  // full variant only
    ViolationList vlists[3];

    CostCounters counters;
    std::int64_t loss_sum = 0;

    PendingDeltas pending;
    bool suppress_accounting = false;
    PendingDeltas last_consumed;  // what find_min drained during the last public op

    BudgetStats budget;

    HeapRecord* melded_into = nullptr;
    std::uint32_t fwd_refs = 0;  // records whose melded_into points here
    NodePool pool;

    bool full() const { return cfg.variant == Variant::Full; }
    void bump_step() { ++counters.structural_steps; }
};

// Plan accounting: increases of the loss sum, |A| and |G| are remembered so
// find_min can size its reduction plan. Reduction steps run with accounting
// suppressed; their side effects never enlarge the active plan.
inline void note_pending_l(HeapRecord* h) {
    if (!h->suppress_accounting) ++h->pending.l;
}
inline void note_pending_a(HeapRecord* h) {
    if (!h->suppress_accounting) ++h->pending.a;
}
inline void note_pending_g(HeapRecord* h) {
    if (!h->suppress_accounting) ++h->pending.g;
}

// RAII guard for the plan-accounting suppression window.
class AccountingGuard {
public:
    explicit AccountingGuard(HeapRecord* h) : h_(h), saved_(h->suppress_accounting) {
        h_->suppress_accounting = true;
    }
    ~AccountingGuard() { h_->suppress_accounting = saved_; }

private:
    HeapRecord* h_;
    bool saved_;
};

// --- record lifecycle ----------------------------------------------------

std::int64_t live_record_census();

HeapRecord* make_record(const VariantConfig& cfg);
// Called after any refcount decrement: trims empty tail rank entries and
// discards melded-away records whose rank-0 refcount drained.
void rank_list_trim(HeapRecord* h);
void destroy_record(HeapRecord* h);

// --- effective node state ------------------------------------------------

inline bool is_implicitly_deferred(const NodeRecord* n) {
    return n->rank->heap->size < 0;
}
inline bool is_effectively_deferred(const NodeRecord* n) {
    return is_implicitly_deferred(n) || n->state == NodeState::ExplicitDeferred;
}
inline bool is_solid(const NodeRecord* n) { return !is_effectively_deferred(n); }
inline bool is_rank_root(const NodeRecord* n) {
    return is_solid(n) &&
           (n->parent == nullptr || n->state == NodeState::SolidNonrankChild);
}
inline bool is_rank_child(const NodeRecord* n) {
    return is_solid(n) && n->parent != nullptr && n->state == NodeState::SolidRankChild;
}
inline std::uint32_t integer_rank(const NodeRecord* n) { return n->rank->index; }

// --- core_structure operations -------------------------------------------

std::uint64_t next_default_id();

NodeRecord* new_node(HeapRecord* h, std::int64_t value);
NodeRecord* new_node_with_id(HeapRecord* h, std::int64_t value, std::uint64_t id);

// Splices `child` into `parent`'s child list at the variant-appropriate end
// and sets its state. Does not touch the parent's rank.
void attach_child(HeapRecord* h, NodeRecord* parent, NodeRecord* child, EdgeKind edge);

// Unlinks a node from its sibling list (child list or root list) and clears
// the parent pointer. List head fix-up is the caller's job for root lists.
void detach(HeapRecord* h, NodeRecord* child);

void rank_shift(HeapRecord* h, NodeRecord* n, int delta);
void release_rank(NodeRecord* n);

// Loss updates that keep the owning heap's loss sum in lockstep.
void set_loss(NodeRecord* n, std::uint32_t value);

}  // namespace wcheap::detail

#endif  // WCHEAP_CORE_HPP
