#include "wcheap/core.hpp"

#include <atomic>
#include <cmath>

namespace wcheap {

double default_rank_bound(std::uint64_t n) {
    if (n < 1) n = 1;
    return 6.0 + 2.0 * std::log2(static_cast<double>(n));
}

}  // namespace wcheap

namespace wcheap::detail {

namespace {
std::atomic<std::int64_t> g_record_census{0};
// Default ids start high so replay harnesses can use small deterministic ids
// without colliding with API-assigned ones.
std::atomic<std::uint64_t> g_id_counter{std::uint64_t{1} << 62};
}  // namespace

std::int64_t live_record_census() { return g_record_census.load(); }

std::uint64_t next_default_id() { return g_id_counter.fetch_add(1); }

// --- NodePool --------------------------------------------------------------

NodePool::~NodePool() {
    Chunk* c = chunks_;
    while (c) {
        Chunk* next = c->next;
        delete c;
        c = next;
    }
}

NodeRecord* NodePool::alloc() {
    NodeRecord* n;
    if (free_head_) {
        n = free_head_;
        free_head_ = n->next_free;
        if (!free_head_) free_tail_ = nullptr;
    } else {
        if (!chunks_tail_ || chunks_tail_->used == kChunkSize) {
            Chunk* c = new Chunk;
            c->slots = std::make_unique<NodeRecord[]>(kChunkSize);
            if (chunks_tail_)
                chunks_tail_->next = c;
            else
                chunks_ = c;
            chunks_tail_ = c;
        }
        n = &chunks_tail_->slots[chunks_tail_->used++];
    }
    std::uint64_t gen = n->generation;
    *n = NodeRecord{};
    n->generation = gen;
    n->live = true;
    return n;
}

void NodePool::release(NodeRecord* n) {
    n->live = false;
    ++n->generation;
    n->next_free = free_head_;
    if (!free_head_) free_tail_ = n;
    free_head_ = n;
}

void NodePool::splice_from(NodePool& other) {
    if (other.chunks_) {
        if (chunks_tail_) {
            chunks_tail_->next = other.chunks_;
        } else {
            chunks_ = other.chunks_;
        }
        chunks_tail_ = other.chunks_tail_;
        other.chunks_ = nullptr;
        other.chunks_tail_ = nullptr;
    }
    // Prepend the other free list.
    if (other.free_head_) {
        other.free_tail_->next_free = free_head_;
        if (!free_head_) free_tail_ = other.free_tail_;
        free_head_ = other.free_head_;
        other.free_head_ = nullptr;
        other.free_tail_ = nullptr;
    }
}

// --- records ---------------------------------------------------------------

HeapRecord* make_record(const VariantConfig& cfg) {
    auto* h = new HeapRecord;
    h->cfg = cfg;
    auto* r0 = new RankEntry;
    r0->heap = h;
    r0->index = 0;
    h->rank_head = r0;
    h->rank_tail = r0;
    for (int i = 0; i < 3; ++i) {
        h->vlists[i].vtype = static_cast<VType>(i);
        h->vlists[i].heap = h;
    }
    ++g_record_census;
    return h;
}

void destroy_record(HeapRecord* h) {
    HeapRecord* forward = h->melded_into;
    for (RankEntry* e = h->rank_head; e;) {
        RankEntry* next = e->next;
        delete e;
        e = next;
    }
    --g_record_census;
    delete h;
    // Dropping the forwarding reference may free the next record in the
    // meld chain.
    if (forward) {
        WCHEAP_CONTRACT(forward->fwd_refs > 0);
        --forward->fwd_refs;
        if (forward->size < 0 && forward->rank_head->refcount == 0 &&
            forward->fwd_refs == 0)
            destroy_record(forward);
    }
}

void rank_list_trim(HeapRecord* h) {
    // Only the tail can drain: every other entry holds a +1 for its
    // successor.
    RankEntry* last = h->rank_tail;
    while (last->prev && last->refcount == 0) {
        RankEntry* prev = last->prev;
        prev->next = nullptr;
        delete last;
        WCHEAP_CONTRACT(prev->refcount > 0);
        --prev->refcount;  // the +1 for having a successor goes away
        last = prev;
    }
    h->rank_tail = last;
    if (h->size < 0 && h->rank_head->refcount == 0 && h->fwd_refs == 0) {
        // Melded-away record with no remaining node or forwarding
        // references: discard. All violation lists must have drained along
        // with the refcounts.
        WCHEAP_CONTRACT(h->vlists[0].size == 0 && h->vlists[1].size == 0 &&
                        h->vlists[2].size == 0);
        destroy_record(h);
    }
}

// --- core node operations ----------------------------------------------------

NodeRecord* new_node(HeapRecord* h, std::int64_t value) {
    return new_node_with_id(h, value, next_default_id());
}

NodeRecord* new_node_with_id(HeapRecord* h, std::int64_t value, std::uint64_t id) {
    WCHEAP_CONTRACT(h->size >= 0);
    NodeRecord* n = h->pool.alloc();
    n->key = Key{value, id};
    n->state = NodeState::SolidNonrankChild;
    n->loss = 0;
    n->rank = h->rank_head;
    ++h->rank_head->refcount;
    return n;
}

void attach_child(HeapRecord* h, NodeRecord* parent, NodeRecord* child, EdgeKind edge) {
    WCHEAP_CONTRACT(child->parent == nullptr);
    SiblingList cl = child_list(parent);
    switch (edge) {
        case EdgeKind::RankEdge:
            // Ranks match at decision time. When the child was cut from the
            // parent itself (loss-1 pair reduction hitting a parent/child
            // pair), the cut already decremented the parent; the caller's
            // rank increment restores equality right after the attach.
            WCHEAP_CONTRACT(integer_rank(parent) == integer_rank(child) ||
                            integer_rank(parent) + 1 == integer_rank(child));
            child->state = NodeState::SolidRankChild;
            cl.push_left(child);
            break;
        case EdgeKind::NonrankSolid:
            child->state = NodeState::SolidNonrankChild;
            if (h->full())
                cl.push_left(child);
            else
                cl.push_right(child);
            break;
        case EdgeKind::Deferred:
            WCHEAP_CONTRACT(h->full());
            child->state = NodeState::ExplicitDeferred;
            cl.push_right(child);
            break;
    }
    parent->child_head = cl.head;
    child->parent = parent;
    h->bump_step();
}

void detach(HeapRecord* h, NodeRecord* child) {
    if (child->parent) {
        SiblingList cl = child_list(child->parent);
        cl.remove(child);
        child->parent->child_head = cl.head;
        child->parent = nullptr;
    } else {
        h->root_list.remove(child);
    }
    h->bump_step();
}

void rank_shift(HeapRecord* h, NodeRecord* n, int delta) {
    RankEntry* cur = n->rank;
    if (delta == +1) {
        if (!cur->next) {
            auto* e = new RankEntry;
            e->heap = cur->heap;
            e->index = cur->index + 1;
            e->prev = cur;
            cur->next = e;
            cur->heap->rank_tail = e;
            ++cur->refcount;  // gained a successor
        }
        n->rank = cur->next;
        ++n->rank->refcount;
        WCHEAP_CONTRACT(cur->refcount > 0);
        --cur->refcount;
        // cur cannot drain: it has a successor now.
    } else {
        WCHEAP_CONTRACT(delta == -1);
        WCHEAP_CONTRACT(cur->prev != nullptr);
        n->rank = cur->prev;
        ++n->rank->refcount;
        WCHEAP_CONTRACT(cur->refcount > 0);
        --cur->refcount;
        if (cur->refcount == 0) rank_list_trim(cur->heap);
    }
    h->bump_step();
}

void release_rank(NodeRecord* n) {
    RankEntry* e = n->rank;
    n->rank = nullptr;
    HeapRecord* owner = e->heap;
    WCHEAP_CONTRACT(e->refcount > 0);
    --e->refcount;
    rank_list_trim(owner);  // may discard a melded-away record
}

void set_loss(NodeRecord* n, std::uint32_t value) {
    HeapRecord* h = n->rank->heap;
    h->loss_sum += static_cast<std::int64_t>(value) - static_cast<std::int64_t>(n->loss);
    n->loss = value;
}

}  // namespace wcheap::detail
