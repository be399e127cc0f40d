#include "wcheap/heap.hpp"

#include <utility>

namespace wcheap {

namespace detail {

void plan_and_reduce(HeapRecord* h, std::uint64_t l, std::uint64_t a, std::uint64_t g) {
    ++h->budget.plan_calls;
    std::uint64_t comps0 = h->counters.comparisons;
    {
        AccountingGuard guard(h);
        if (h->full()) {
            for (std::uint64_t i = 0; i < l; ++i) reduction_step_l(h);
            // One {A, G, G} group per unit of l and per pair of g. An odd g
            // gets one extra plain G-step: the group capacity of -2 on |G|
            // still covers it, and the comparison total stays within
            // 9l+5a+3g+1 (a full group on the odd unit would not).
            std::uint64_t groups = l + g / 2;
            for (std::uint64_t i = 0; i < groups; ++i) {
                reduction_step_a(h);
                reduction_step_g(h);
                reduction_step_g(h);
            }
            if (g % 2) reduction_step_g(h);
            for (std::uint64_t i = 0; i < a; ++i) {
                reduction_step_a(h);
                reduction_step_g(h);
            }
        } else {
            for (std::uint64_t i = 0; i < l; ++i) reduction_step_l(h);
            for (std::uint64_t i = 0; i < a + l; ++i) reduction_step_a(h);
        }
    }
    std::uint64_t used = h->counters.comparisons - comps0;
    std::uint64_t limit = h->full() ? 9 * l + 5 * a + 3 * g + 1 : 2 * l + a;
    if (used > limit) ++h->budget.plan_budget_violations;
    if (used > h->budget.max_plan_comparisons) h->budget.max_plan_comparisons = used;
    h->last_consumed.l += l;
    h->last_consumed.a += a;
    h->last_consumed.g += g;
}

namespace {

// The k roots traversed by find_min phase 1 are covered by a dedicated plan
// of k A-reductions and k+1 G-reductions (k A-reductions, simplified).
void execute_root_plan(HeapRecord* h, std::uint64_t k) {
    if (k == 0) return;
    AccountingGuard guard(h);
    if (h->full()) {
        for (std::uint64_t i = 0; i < k; ++i) {
            reduction_step_a(h);
            reduction_step_g(h);
        }
        reduction_step_g(h);
    } else {
        for (std::uint64_t i = 0; i < k; ++i) reduction_step_a(h);
    }
}

}  // namespace

void find_min_normalize(HeapRecord* h) {
    PendingDeltas pending = h->pending;
    h->pending = PendingDeltas{};

    // Phase 1: walk the roots, make parent pointers explicit, convert
    // deferred roots to solid ones (into G) and register unlisted solid
    // roots in A. All of this is covered by the root plan, not the pending
    // plan, so accounting stays off.
    std::uint64_t k = 0;
    {
        AccountingGuard guard(h);
        NodeRecord* next = nullptr;
        for (NodeRecord* r = h->root_list.head; r; r = next) {
            next = r->sib_right;
            ++k;
            r->parent = nullptr;
            if (is_effectively_deferred(r)) {
                make_solid_root(h, r);
            } else if (r->violation == nullptr || r->violation->vtype == VType::L) {
                // Freshly inserted nodes and promoted ex rank children:
                // they became rank roots, so any loss is void.
                if (r->violation) vl_remove(h, r);
                if (r->loss) set_loss(r, 0);
                r->state = NodeState::SolidNonrankChild;
                vl_insert(h, r, VType::A);
            }
        }
    }
    plan_and_reduce(h, pending.l, pending.a, pending.g);
    execute_root_plan(h, k);

    // Phase 2: link neighbouring roots leftwise, stepping left past each
    // linked pair and wrapping at the list's left end, so the roots are
    // linked as evenly as a tournament.
    while (h->root_list.head && !h->root_list.single()) {
        NodeRecord* c = h->root_list.rightmost();
        while (c) {
            NodeRecord* l = h->root_list.real_left(c);
            if (!l) break;
            NodeRecord* next_c = h->root_list.real_left(l);
            link_nodes(h, l, c);
            c = next_c;
        }
    }

    // Violations created by the phase-2 links seed a fresh plan.
    PendingDeltas p2 = h->pending;
    h->pending = PendingDeltas{};
    plan_and_reduce(h, p2.l, p2.a, p2.g);
}

NodeHandle Access::raw_insert(Heap& h, std::int64_t value) {
    HeapRecord* rec = h.rec_;
    NodeRecord* n = new_node(rec, value);
    rec->size += 1;
    rec->root_list.push_right(n);
    if (rec->full()) rec->node_list.push_right(n);
    return NodeHandle{n, n->generation};
}

}  // namespace detail

using detail::HeapRecord;
using detail::NodeRecord;

Heap::Heap(VariantConfig cfg) : rec_(detail::make_record(cfg)) {}

Heap::~Heap() {
    if (melded_ || !rec_) return;
    // Full teardown protocol per node so records of melded-away heaps drain
    // their refcounts and reclaim.
    rec_->pool.for_each_live([](NodeRecord* n) {
        detail::ViolationEntry* e = n->violation;
        if (e) {
            if (e->rank_entry) {
                auto*& anchor = e->rank_entry->anchor[static_cast<int>(e->vtype)];
                if (anchor == e) anchor = nullptr;
                e->list->organized.remove(e);
            } else {
                e->list->unorganized.remove(e);
            }
            --e->list->size;
            n->violation = nullptr;
            delete e;
        }
        detail::release_rank(n);
    });
    detail::destroy_record(rec_);
}

Heap::Heap(Heap&& other) noexcept : rec_(other.rec_), melded_(other.melded_) {
    other.rec_ = nullptr;
    other.melded_ = false;
}

Heap& Heap::operator=(Heap&& other) noexcept {
    if (this != &other) {
        Heap tmp(std::move(*this));  // release current state
        rec_ = other.rec_;
        melded_ = other.melded_;
        other.rec_ = nullptr;
        other.melded_ = false;
    }
    return *this;
}

void Heap::require_live() const {
    if (melded_ || rec_ == nullptr)
        throw Error(Error::Code::InvalidHeap, "heap was melded away");
}

NodeRecord* Heap::checked_node(NodeHandle handle) const {
    NodeRecord* n = handle.node;
    if (!n || !n->live || n->generation != handle.generation)
        throw Error(Error::Code::InvalidHandle, "stale node handle");
    HeapRecord* owner = n->rank->heap;
    while (owner->melded_into) owner = owner->melded_into;
    if (owner != rec_)
        throw Error(Error::Code::InvalidHandle, "node belongs to another heap");
    return n;
}

NodeHandle Heap::insert(std::int64_t value) {
    return insert(value, detail::next_default_id());
}

NodeHandle Heap::insert(std::int64_t value, std::uint64_t id) {
    require_live();
    NodeRecord* n = detail::new_node_with_id(rec_, value, id);
    rec_->size += 1;  // no side effects on increment
    rec_->root_list.push_right(n);
    rec_->bump_step();
    if (rec_->full()) {
        rec_->node_list.push_right(n);
        rec_->bump_step();
    }
    rec_->last_consumed = detail::PendingDeltas{};
    detail::find_min_normalize(rec_);
    return NodeHandle{n, n->generation};
}

std::optional<Key> Heap::find_min() const {
    require_live();
    if (rec_->size == 0) return std::nullopt;
    WCHEAP_CONTRACT(rec_->root_list.single());
    return rec_->root_list.leftmost()->key;
}

Key Heap::delete_min() {
    require_live();
    if (rec_->size == 0) throw Error(Error::Code::EmptyHeap, "delete_min on empty heap");
    WCHEAP_CONTRACT(rec_->root_list.single());
    NodeRecord* rho = rec_->root_list.leftmost();
    Key out = rho->key;
    rec_->last_consumed = detail::PendingDeltas{};

    // Off the node list before the size decrement so maintenance never
    // inspects a half-deleted node.
    if (rec_->full()) {
        rec_->node_list.remove(rho);
        rec_->bump_step();
    }
    rec_->size -= 1;
    detail::node_list_maintenance(rec_);

    // The root list becomes rho's child list.
    rec_->root_list.remove(rho);
    rec_->root_list.head = rho->child_head;
    rho->child_head = nullptr;
    rec_->bump_step();

    if (rho->violation) detail::vl_remove(rec_, rho);
    detail::release_rank(rho);
    detail::find_min_normalize(rec_);
    rec_->pool.release(rho);
    return out;
}

void Heap::decrease_key(NodeHandle handle, std::int64_t new_value) {
    require_live();
    NodeRecord* n = checked_node(handle);
    if (new_value >= n->key.value)
        throw Error(Error::Code::KeyIncrease, "decrease_key with non-decreasing value");
    rec_->last_consumed = detail::PendingDeltas{};
    if (n->parent) detail::remove_child(rec_, n);
    n->key.value = new_value;
    detail::find_min_normalize(rec_);
}

Heap& Heap::meld(Heap& h1, Heap& h2) {
    if (&h1 == &h2) throw Error(Error::Code::InvalidHeap, "meld of a heap with itself");
    h1.require_live();
    h2.require_live();
    if (h1.rec_->cfg.variant != Variant::Full || h2.rec_->cfg.variant != Variant::Full)
        throw Error(Error::Code::Unsupported, "meld requires the full variant");

    Heap* small = (h1.rec_->size <= h2.rec_->size) ? &h1 : &h2;
    Heap* big = (small == &h1) ? &h2 : &h1;
    HeapRecord* hs = small->rec_;
    HeapRecord* hh = big->rec_;
    hh->last_consumed = detail::PendingDeltas{};

    hh->node_list.splice_prepend(hs->node_list);
    hh->bump_step();
    hh->size += hs->size;
    hs->size = -1;  // all hs nodes are implicitly deferred from here on
    hh->root_list.splice_prepend(hs->root_list);
    hh->bump_step();
    hs->melded_into = hh;
    ++hh->fwd_refs;
    hh->pool.splice_from(hs->pool);
    hh->budget.absorb(hs->budget);
    hs->budget = detail::BudgetStats{};
    small->melded_ = true;
    small->rec_ = nullptr;

    // An empty record has no refcounts left to drain; reclaim it eagerly.
    detail::rank_list_trim(hs);

    detail::find_min_normalize(hh);
    return *big;
}

std::int64_t Heap::size() const {
    require_live();
    return rec_->size;
}

const CostCounters& Heap::counters() const {
    require_live();
    return rec_->counters;
}

const detail::BudgetStats& Heap::budget_stats() const {
    require_live();
    return rec_->budget;
}

const detail::PendingDeltas& Heap::last_consumed() const {
    require_live();
    return rec_->last_consumed;
}

const VariantConfig& Heap::config() const {
    require_live();
    return rec_->cfg;
}

Key Heap::key_of(NodeHandle handle) const {
    require_live();
    return checked_node(handle)->key;
}

}  // namespace wcheap
