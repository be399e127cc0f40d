#include "wcheap/transform.hpp"

namespace wcheap::detail {

namespace {

struct StepMeter {
    HeapRecord* h;
    std::uint64_t comps0;
    std::int64_t a0, g0, l0;

    explicit StepMeter(HeapRecord* heap)
        : h(heap),
          comps0(heap->counters.comparisons),
          a0(static_cast<std::int64_t>(heap->vlists[0].size)),
          g0(static_cast<std::int64_t>(heap->vlists[1].size)),
          l0(heap->loss_sum) {}

    StepOutcome finish(bool applied) const {
        StepOutcome out;
        out.applied = applied;
        out.comparisons = h->counters.comparisons - comps0;
        out.d_a = static_cast<std::int64_t>(h->vlists[0].size) - a0;
        out.d_g = static_cast<std::int64_t>(h->vlists[1].size) - g0;
        out.d_loss_sum = h->loss_sum - l0;
        return out;
    }
};

void record_step(HeapRecord* h, StepKind kind, std::uint64_t comps, std::uint64_t row_max) {
    ++h->budget.steps_applied[kind];
    if (comps > row_max) ++h->budget.step_budget_violations;
}

}  // namespace

void make_explicit_deferred(HeapRecord* h, NodeRecord* n) {
    WCHEAP_CONTRACT(is_implicitly_deferred(n));
    if (n->violation) vl_remove(h, n);  // trivial removal path
    n->state = NodeState::ExplicitDeferred;
    n->loss = 0;  // dead record's loss sum is frozen, adjust the field only
    release_rank(n);
    n->rank = h->rank_head;
    ++h->rank_head->refcount;
    h->bump_step();
}

void make_solid_root(HeapRecord* h, NodeRecord* n) {
    WCHEAP_CONTRACT(n->parent == nullptr);
    WCHEAP_CONTRACT(is_effectively_deferred(n));
    if (is_implicitly_deferred(n)) make_explicit_deferred(h, n);
    WCHEAP_CONTRACT(integer_rank(n) == 0 && n->loss == 0);
    n->state = NodeState::SolidNonrankChild;
    vl_insert(h, n, h->full() ? VType::G : VType::A);
    if (h->full())
        note_pending_g(h);
    else
        note_pending_a(h);
}

void remove_child(HeapRecord* h, NodeRecord* c) {
    NodeRecord* p = c->parent;
    WCHEAP_CONTRACT(p != nullptr);
    bool was_rank_child = is_rank_child(c);
    detach(h, c);
    h->root_list.push_right(c);
    h->bump_step();
    if (was_rank_child && !h->cfg.inject_skip_rank_decrement)
        rank_decrement(h, p, DecrementCause::ChildRemoval);
}

void rank_decrement(HeapRecord* h, NodeRecord* p, DecrementCause cause) {
    WCHEAP_CONTRACT(is_solid(p));
    WCHEAP_CONTRACT(integer_rank(p) >= 1);
    if (is_rank_root(p)) {
        WCHEAP_CONTRACT(p->violation != nullptr && p->violation->vtype != VType::L);
        VType from = p->violation->vtype;
        vl_remove(h, p);
        rank_shift(h, p, -1);
        VType to = !h->full()                              ? VType::A
                   : cause == DecrementCause::ChildRemoval ? VType::G
                                                           : from;
        vl_insert(h, p, to);
        if (to == VType::G && from == VType::A) note_pending_g(h);
    } else {
        // Rank child: loss grows. The organized L entry is keyed under the
        // rank it was filed at, so remove it before the shift can trim that
        // rank entry; the fresh loss-1 entry is filed under the new rank.
        std::uint32_t new_loss = p->loss + 1;
        if (new_loss == 1) {
            rank_shift(h, p, -1);
            set_loss(p, 1);
            vl_insert(h, p, VType::L);
        } else if (new_loss == 2) {
            vl_remove(h, p);
            rank_shift(h, p, -1);
            set_loss(p, 2);
            vl_insert_loss2(h, p);
        } else {
            rank_shift(h, p, -1);
            set_loss(p, new_loss);
        }
        note_pending_l(h);
    }
}

void rank_increment_rank_root(HeapRecord* h, NodeRecord* s) {
    WCHEAP_CONTRACT(is_rank_root(s));
    WCHEAP_CONTRACT(s->violation != nullptr && s->violation->vtype != VType::L);
    VType from = s->violation->vtype;
    vl_remove(h, s);
    rank_shift(h, s, +1);
    if (!h->full()) {
        vl_insert(h, s, VType::A);
        return;
    }
    if (from == VType::G) {
        vl_insert(h, s, VType::A);
        note_pending_a(h);
    } else {
        vl_insert(h, s, VType::G);
        note_pending_g(h);
        degree_reduction_step(h, s);
    }
}

NodeRecord* link_nodes(HeapRecord* h, NodeRecord* a, NodeRecord* b) {
    WCHEAP_CONTRACT(a != b);
    WCHEAP_CONTRACT(is_solid(a) && is_solid(b));
    bool equal_rank = integer_rank(a) == integer_rank(b);

    NodeRecord* s;
    NodeRecord* hi;
    if (key_less(a->key, b->key, h->counters)) {
        s = a;
        hi = b;
    } else {
        s = b;
        hi = a;
    }

    if (hi->parent == nullptr) {
        h->root_list.remove(hi);
        h->bump_step();
    } else {
        remove_child(h, hi);
        h->root_list.remove(hi);
        h->bump_step();
    }

    if (equal_rank) {
        // hi becomes a rank child: it leaves whichever violation list it was
        // in (A/G as an ex rank root, L in the loss-1 pair reduction) and its
        // loss resets under the fresh rank edge.
        if (hi->violation) vl_remove(h, hi);
        if (hi->loss) set_loss(hi, 0);
        attach_child(h, s, hi, EdgeKind::RankEdge);
        if (is_rank_root(s)) {
            if (s->violation)
                rank_increment_rank_root(h, s);
            else
                rank_shift(h, s, +1);  // transient roots in unit scenarios
        } else {
            // Rank child gaining a rank child (loss-1 pair reduction): the
            // increment cancels the loss.
            if (s->violation) vl_remove(h, s);
            if (s->loss) set_loss(s, 0);
            rank_shift(h, s, +1);
        }
    } else {
        // The loser keeps its rank-root status and its A/G membership.
        attach_child(h, s, hi, EdgeKind::NonrankSolid);
    }
    return s;
}

StepOutcome degree_reduction_step(HeapRecord* h, NodeRecord* x) {
    if (!h->full()) return StepOutcome{};
    StepMeter meter(h);

    if (is_implicitly_deferred(x)) make_explicit_deferred(h, x);

    SiblingList cl = child_list(x);
    NodeRecord* c1 = cl.rightmost();
    NodeRecord* c2 = c1 ? cl.real_left(c1) : nullptr;
    NodeRecord* c3 = c2 ? cl.real_left(c2) : nullptr;
    if (!c3 || !is_effectively_deferred(c1) || !is_effectively_deferred(c2) ||
        !is_effectively_deferred(c3))
        return meter.finish(false);

    for (NodeRecord* c : {c1, c2, c3}) {
        if (is_implicitly_deferred(c)) make_explicit_deferred(h, c);
        detach(h, c);
    }

    // Order the three keys: s < m < hi (two or three comparisons).
    NodeRecord* s = c1;
    NodeRecord* m = c2;
    NodeRecord* hi = c3;
    if (key_less(m->key, s->key, h->counters)) std::swap(s, m);
    if (key_less(hi->key, m->key, h->counters)) {
        std::swap(m, hi);
        if (key_less(m->key, s->key, h->counters)) std::swap(s, m);
    }

    attach_child(h, s, m, EdgeKind::RankEdge);  // both rank 0
    rank_shift(h, s, +1);
    attach_child(h, m, hi, EdgeKind::Deferred);
    attach_child(h, x, s, EdgeKind::NonrankSolid);
    vl_insert(h, s, VType::A);  // new rank root without guaranteed reserve
    note_pending_a(h);

    StepOutcome out = meter.finish(true);
    record_step(h, kStepDegree, out.comparisons, 3);
    return out;
}

StepOutcome reduction_step_a(HeapRecord* h) {
    auto pair = vl_take_same_rank_pair(h, VType::A);
    if (!pair) return StepOutcome{};
    StepMeter meter(h);
    std::uint64_t dr0 = h->budget.steps_applied[kStepDegree];
    {
        AccountingGuard guard(h);
        link_nodes(h, pair->first, pair->second);
    }
    StepOutcome out = meter.finish(true);
    bool dr_fired = h->budget.steps_applied[kStepDegree] != dr0;
    record_step(h, kStepA, out.comparisons, dr_fired ? 4 : 1);
    return out;
}

StepOutcome reduction_step_g(HeapRecord* h) {
    auto pair = vl_take_same_rank_pair(h, VType::G);
    if (!pair) return StepOutcome{};
    StepMeter meter(h);
    {
        AccountingGuard guard(h);
        link_nodes(h, pair->first, pair->second);
    }
    StepOutcome out = meter.finish(true);
    record_step(h, kStepG, out.comparisons, 1);
    return out;
}

StepOutcome reduction_step_l(HeapRecord* h) {
    if (NodeRecord* x = vl_peek_loss2(h)) {
        // Loss >= 2: convert the rank edge to a nonrank edge. Zero
        // comparisons unless the parent's 0->1 loss forces a degree
        // reduction.
        StepMeter meter(h);
        std::uint64_t dr0 = h->budget.steps_applied[kStepDegree];
        {
            AccountingGuard guard(h);
            NodeRecord* p = x->parent;
            WCHEAP_CONTRACT(p != nullptr && is_rank_child(x));
            vl_remove(h, x);
            set_loss(x, 0);
            x->state = NodeState::SolidNonrankChild;
            vl_insert(h, x, h->full() ? VType::G : VType::A);
            bool parent_loses_reserve = is_rank_child(p) && p->loss == 0;
            rank_decrement(h, p, DecrementCause::ChildConversion);
            if (h->full() && parent_loses_reserve) degree_reduction_step(h, p);
        }
        StepOutcome out = meter.finish(true);
        bool dr_fired = h->budget.steps_applied[kStepDegree] != dr0;
        record_step(h, kStepL, out.comparisons, dr_fired ? 3 : 0);
        return out;
    }
    if (auto pair = vl_take_same_rank_pair(h, VType::L)) {
        // The pair may be a parent and its own rank child; heap order makes
        // the parent win the link, and the cut-then-relink cancels out.
        StepMeter meter(h);
        {
            AccountingGuard guard(h);
            link_nodes(h, pair->first, pair->second);
        }
        StepOutcome out = meter.finish(true);
        record_step(h, kStepL, out.comparisons, 1);
        return out;
    }
    return StepOutcome{};
}

void node_list_maintenance(HeapRecord* h) {
    if (!h->full()) return;
    for (int round = 0; round < 2; ++round) {
        NodeRecord* f = h->node_list.leftmost();
        if (!f) break;
        degree_reduction_step(h, f);
        degree_reduction_step(h, f);
        h->node_list.remove(f);
        h->node_list.push_right(f);
        h->bump_step();
    }
}

}  // namespace wcheap::detail
