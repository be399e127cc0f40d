#include "wcheap/violation.hpp"

namespace wcheap::detail {

namespace {

bool same_rank(ViolationEntry* anchor, ViolationEntry* e) {
    return e != nullptr && e->rank_entry == anchor->rank_entry;
}

}  // namespace

void vl_insert(HeapRecord* h, NodeRecord* n, VType t) {
    WCHEAP_CONTRACT(n->violation == nullptr);
    WCHEAP_CONTRACT(t != VType::G || h->full());
    ViolationList& vl = h->vlists[static_cast<int>(t)];
    RankEntry* re = n->rank;
    WCHEAP_CONTRACT(re->heap == h);

    auto* e = new ViolationEntry;
    e->vtype = t;
    e->node = n;
    e->rank_entry = re;
    e->list = &vl;

    ViolationEntry*& anchor = re->anchor[static_cast<int>(t)];
    if (anchor == nullptr) {
        anchor = e;
        vl.organized.push_left(e);
    } else {
        ViolationEntry* ln = vl.organized.real_left(anchor);
        ViolationEntry* rn = vl.organized.real_right(anchor);
        if (!same_rank(anchor, ln) && !same_rank(anchor, rn)) {
            vl.organized.remove(anchor);
            vl.organized.push_right(anchor);
        }
        vl.organized.insert_after(anchor, e);
    }
    n->violation = e;
    ++vl.size;
    h->bump_step();
}

void vl_insert_loss2(HeapRecord* h, NodeRecord* n) {
    WCHEAP_CONTRACT(n->violation == nullptr);
    WCHEAP_CONTRACT(n->loss >= 2);
    ViolationList& vl = h->vlists[static_cast<int>(VType::L)];
    auto* e = new ViolationEntry;
    e->vtype = VType::L;
    e->node = n;
    e->rank_entry = nullptr;  // unorganized segment
    e->list = &vl;
    vl.unorganized.push_right(e);
    n->violation = e;
    ++vl.size;
    h->bump_step();
}

void vl_remove(HeapRecord* h, NodeRecord* n) {
    ViolationEntry* e = n->violation;
    WCHEAP_CONTRACT(e != nullptr);
    ViolationList* vl = e->list;

    if (is_implicitly_deferred(n)) {
        // Entry lingers in a melded-away heap's list; the anchors of that
        // dead rank list are never consulted again, so unlink without any
        // reorganization. Clear the anchor if it points here to avoid a
        // dangling pointer.
        if (e->rank_entry) {
            ViolationEntry*& anchor = e->rank_entry->anchor[static_cast<int>(e->vtype)];
            if (anchor == e) anchor = nullptr;
            vl->organized.remove(e);
        } else {
            vl->unorganized.remove(e);
        }
    } else if (e->rank_entry == nullptr) {
        vl->unorganized.remove(e);
    } else {
        RankEntry* re = e->rank_entry;
        ViolationEntry*& anchor = re->anchor[static_cast<int>(e->vtype)];
        if (anchor == e) {
            ViolationEntry* rn = vl->organized.real_right(e);
            anchor = same_rank(e, rn) ? rn : nullptr;
        }
        vl->organized.remove(e);
        if (anchor != nullptr) {
            ViolationEntry* rn = vl->organized.real_right(anchor);
            if (!same_rank(anchor, rn)) {
                // The run shrank to a single entry; park it at the left end
                // so the right end keeps exposing a pair when one exists.
                vl->organized.remove(anchor);
                vl->organized.push_left(anchor);
            }
        }
    }

    WCHEAP_CONTRACT(vl->size > 0);
    --vl->size;
    n->violation = nullptr;
    delete e;
    h->bump_step();
}

std::optional<std::pair<NodeRecord*, NodeRecord*>> vl_take_same_rank_pair(HeapRecord* h,
                                                                          VType t) {
    ViolationList& vl = h->vlists[static_cast<int>(t)];
    ViolationEntry* last = vl.organized.rightmost();
    if (!last) return std::nullopt;
    ViolationEntry* prev = vl.organized.real_left(last);
    if (!prev || prev->rank_entry != last->rank_entry) return std::nullopt;
    return std::make_pair(prev->node, last->node);
}

NodeRecord* vl_peek_loss2(HeapRecord* h) {
    ViolationEntry* e = h->vlists[static_cast<int>(VType::L)].unorganized.leftmost();
    return e ? e->node : nullptr;
}

}  // namespace wcheap::detail
