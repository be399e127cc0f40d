#include "wcheap/checker.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace wcheap {

namespace {

using namespace detail;

class Auditor {
public:
    explicit Auditor(const Heap& heap)
        : heap_(heap), rec_(const_cast<HeapRecord*>(Access::record(heap))) {}

    InvariantReport run();

private:
    struct Check {
        InvariantReport::Item item;
        void fail(const std::string& detail) {
            if (item.pass) {
                item.pass = false;
                item.detail = detail;
            }
        }
    };

    Check& check(const std::string& name) {
        checks_.emplace_back();
        checks_.back().item.name = name;
        return checks_.back();
    }

    static std::string node_str(const NodeRecord* n) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "node(value=%lld,id=%llu)",
                      static_cast<long long>(n->key.value),
                      static_cast<unsigned long long>(n->key.id));
        return buf;
    }

    void collect_forest();
    void check_lists();
    void check_structure();
    void check_violation_lists();
    void check_anchors_and_pairs();
    void check_bounds();
    void check_refcounts();

    const Heap& heap_;
    HeapRecord* rec_;
    std::deque<Check> checks_;  // stable references across check() calls

    std::vector<NodeRecord*> nodes_;                 // every live node, via tree walk
    std::unordered_set<const NodeRecord*> seen_;
    bool forest_ok_ = true;
};

void Auditor::collect_forest() {
    auto& forest = check("forest");
    auto& heap_order = check("heap_order");
    auto& single = check("single_tree");

    std::size_t roots = rec_->root_list.count();
    if (roots > 1) single.fail("root list has " + std::to_string(roots) + " trees");

    std::vector<NodeRecord*> stack;
    rec_->root_list.for_each([&](NodeRecord* r) {
        if (r->parent != nullptr) forest.fail(node_str(r) + " on root list has a parent");
        stack.push_back(r);
    });
    while (!stack.empty()) {
        NodeRecord* n = stack.back();
        stack.pop_back();
        if (!seen_.insert(n).second) {
            forest.fail(node_str(n) + " reachable twice");
            forest_ok_ = false;
            continue;
        }
        nodes_.push_back(n);
        for (NodeRecord* c = n->child_head; c; c = c->sib_right) {
            if (c->parent != n) forest.fail(node_str(c) + " has wrong parent pointer");
            if (!key_less_raw(n->key, c->key))
                heap_order.fail(node_str(n) + " not smaller than child " + node_str(c));
            if (seen_.count(c)) {
                forest.fail(node_str(c) + " reachable twice");
                forest_ok_ = false;
                break;
            }
            stack.push_back(c);
        }
    }

    auto& census = check("node_census");
    if (rec_->size >= 0 &&
        nodes_.size() != static_cast<std::size_t>(rec_->size))
        census.fail("tree walk found " + std::to_string(nodes_.size()) + " nodes, size is " +
                    std::to_string(rec_->size));
}

void Auditor::check_lists() {
    auto& cyc = check("cyclic_lists");

    auto check_sibling_list = [&](NodeRecord* head, const char* what) {
        if (!head) return;
        std::size_t steps = 0;
        NodeRecord* last = nullptr;
        for (NodeRecord* x = head; x; x = x->sib_right) {
            if (++steps > nodes_.size() + 2) {
                cyc.fail(std::string(what) + ": right-walk does not terminate");
                return;
            }
            if (x->sib_right && x->sib_right->sib_left != x)
                cyc.fail(std::string(what) + ": left link of right neighbour broken");
            last = x;
        }
        if (head->sib_left != last)
            cyc.fail(std::string(what) + ": left of leftmost is not rightmost");
    };

    check_sibling_list(rec_->root_list.head, "root list");
    for (NodeRecord* n : nodes_) check_sibling_list(n->child_head, "child list");

    if (rec_->full()) {
        std::size_t steps = 0;
        NodeRecord* last = nullptr;
        for (NodeRecord* x = rec_->node_list.head; x; x = x->nl_right) {
            if (++steps > nodes_.size() + 2) {
                cyc.fail("node list: right-walk does not terminate");
                break;
            }
            if (x->nl_right && x->nl_right->nl_left != x)
                cyc.fail("node list: left link broken");
            last = x;
        }
        if (rec_->node_list.head && rec_->node_list.head->nl_left != last)
            cyc.fail("node list: left of leftmost is not rightmost");

        auto& nl = check("node_list_census");
        std::unordered_set<const NodeRecord*> on_list;
        rec_->node_list.for_each([&](NodeRecord* x) {
            if (!on_list.insert(x).second) nl.fail(node_str(x) + " twice on node list");
            if (!seen_.count(x)) nl.fail(node_str(x) + " on node list but not in forest");
        });
        for (NodeRecord* n : nodes_)
            if (!on_list.count(n)) nl.fail(node_str(n) + " missing from node list");
    }
}

void Auditor::check_structure() {
    auto& rank_c = check("rank_equals_rank_children");
    auto& segments = check("child_segments");
    auto& deferral = check("deferral_shape");
    auto& loss_cls = check("loss_zero_classes");
    auto& loss_sum_c = check("loss_sum_cache");

    std::int64_t loss_sum = 0;
    for (NodeRecord* n : nodes_) {
        bool deferred = is_effectively_deferred(n);

        // Child segment layout: full variant keeps solid children in a left
        // segment and deferred ones in a right segment.
        bool seen_deferred = false;
        std::size_t rank_children = 0;
        for (NodeRecord* c = n->child_head; c; c = c->sib_right) {
            bool cd = is_effectively_deferred(c);
            if (rec_->full()) {
                if (cd) seen_deferred = true;
                else if (seen_deferred)
                    segments.fail(node_str(n) + " has solid child right of a deferred one");
            } else if (cd) {
                deferral.fail(node_str(n) + " has a deferred child in the simplified variant");
            }
            if (!cd && c->state == NodeState::SolidRankChild) ++rank_children;
        }

        if (deferred) {
            if (is_implicitly_deferred(n)) {
                // Implicitly deferred nodes cannot have solid children (the
                // whole subtree melded away together).
                for (NodeRecord* c = n->child_head; c; c = c->sib_right)
                    if (!is_effectively_deferred(c))
                        deferral.fail(node_str(n) + " implicitly deferred with solid child");
            } else {
                // Explicitly deferred: rank 0, no rank children, but solid
                // nonrank children are allowed (degree reduction hangs its
                // bundle under the reduced node).
                if (integer_rank(n) != 0)
                    deferral.fail(node_str(n) + " explicit-deferred with rank " +
                                  std::to_string(integer_rank(n)));
                if (rank_children != 0)
                    deferral.fail(node_str(n) + " explicit-deferred with rank children");
                if (n->loss != 0) loss_cls.fail(node_str(n) + " explicit-deferred with loss");
                if (n->rank->heap != rec_)
                    deferral.fail(node_str(n) + " explicit-deferred with foreign rank");
            }
            continue;  // effective rank/loss are zero by definition
        }

        if (integer_rank(n) != rank_children)
            rank_c.fail(node_str(n) + " rank " + std::to_string(integer_rank(n)) +
                        " but " + std::to_string(rank_children) + " rank children");
        if (n->rank->heap != rec_) rank_c.fail(node_str(n) + " solid with foreign rank entry");
        if (is_rank_root(n) && n->loss != 0)
            loss_cls.fail(node_str(n) + " rank root with loss " + std::to_string(n->loss));
        loss_sum += n->loss;
    }

    if (loss_sum != rec_->loss_sum)
        loss_sum_c.fail("cached loss sum " + std::to_string(rec_->loss_sum) +
                        " but traversal finds " + std::to_string(loss_sum));
}

void Auditor::check_violation_lists() {
    auto& bij = check("violation_bijection");
    auto& lseg = check("l_segmentation");

    // Node -> required membership.
    for (NodeRecord* n : nodes_) {
        ViolationEntry* e = n->violation;
        if (is_implicitly_deferred(n)) {
            if (e && e->list->heap->size >= 0)
                bij.fail(node_str(n) + " implicitly deferred but listed in a live heap");
            continue;
        }
        if (n->state == NodeState::ExplicitDeferred) {
            if (e) bij.fail(node_str(n) + " explicit-deferred but in a violation list");
            continue;
        }
        if (is_rank_root(n)) {
            if (!e || (e->vtype != VType::A && e->vtype != VType::G))
                bij.fail(node_str(n) + " rank root not in A or G");
            else if (e->list->heap != rec_)
                bij.fail(node_str(n) + " rank root listed in foreign heap");
            else if (e->vtype == VType::G && !rec_->full())
                bij.fail(node_str(n) + " in G in the simplified variant");
            continue;
        }
        // solid rank child
        if (n->loss == 0) {
            if (e) bij.fail(node_str(n) + " loss 0 but in a violation list");
        } else {
            if (!e || e->vtype != VType::L)
                bij.fail(node_str(n) + " loss " + std::to_string(n->loss) + " but not in L");
            else if (n->loss == 1 && e->rank_entry == nullptr)
                lseg.fail(node_str(n) + " loss 1 in the unorganized segment");
            else if (n->loss >= 2 && e->rank_entry != nullptr)
                lseg.fail(node_str(n) + " loss >= 2 in the organized segment");
        }
    }

    // Entry -> node backlink round trip and size caches.
    for (int t = 0; t < 3; ++t) {
        ViolationList& vl = rec_->vlists[t];
        std::size_t count = 0;
        auto scan = [&](ViolationEntry* e, bool organized) {
            ++count;
            if (e->node == nullptr || e->node->violation != e)
                bij.fail("entry backlink broken in list " + std::to_string(t));
            else if (!seen_.count(e->node))
                bij.fail("entry for unreachable node in list " + std::to_string(t));
            if (organized && e->rank_entry != e->node->rank)
                bij.fail(node_str(e->node) + " filed under a stale rank");
            if (e->list != &vl) bij.fail("entry owner pointer broken");
        };
        vl.organized.for_each([&](ViolationEntry* e) { scan(e, true); });
        vl.unorganized.for_each([&](ViolationEntry* e) { scan(e, false); });
        if (t != static_cast<int>(VType::L) && vl.unorganized.head != nullptr)
            lseg.fail("non-L list has an unorganized segment");
        if (count != vl.size)
            bij.fail("list " + std::to_string(t) + " size cache " + std::to_string(vl.size) +
                     " but " + std::to_string(count) + " entries");
    }
}

void Auditor::check_anchors_and_pairs() {
    auto& anchors = check("anchor_runs");
    auto& pair = check("pair_at_right_end");

    for (int t = 0; t < 3; ++t) {
        ViolationList& vl = rec_->vlists[t];
        // Runs: same-rank entries must be contiguous, anchored at their
        // leftmost member.
        std::unordered_map<RankEntry*, std::size_t> entries_of_rank;
        std::unordered_map<RankEntry*, ViolationEntry*> leftmost_of_rank;
        RankEntry* prev_rank = nullptr;
        vl.organized.for_each([&](ViolationEntry* e) {
            auto [it, fresh] = entries_of_rank.try_emplace(e->rank_entry, 0);
            ++it->second;
            if (fresh) {
                leftmost_of_rank[e->rank_entry] = e;
            } else if (prev_rank != e->rank_entry) {
                anchors.fail("rank run split in list " + std::to_string(t));
            }
            prev_rank = e->rank_entry;
        });
        for (auto& [re, leftmost] : leftmost_of_rank) {
            if (re->anchor[t] != leftmost)
                anchors.fail("anchor of rank " + std::to_string(re->index) + " in list " +
                             std::to_string(t) + " is not the leftmost run entry");
        }
        // Anchors of ranks without entries must be clear (live heap's ranks).
        for (RankEntry* re = rec_->rank_head; re; re = re->next) {
            if (re->anchor[t] != nullptr && !entries_of_rank.count(re))
                anchors.fail("dangling anchor at rank " + std::to_string(re->index) +
                             " in list " + std::to_string(t));
        }

        bool duplicate_exists = false;
        for (auto& [re, cnt] : entries_of_rank)
            if (cnt >= 2) duplicate_exists = true;
        ViolationEntry* last = vl.organized.rightmost();
        ViolationEntry* prev = last ? vl.organized.real_left(last) : nullptr;
        bool pair_at_end = last && prev && last->rank_entry == prev->rank_entry;
        if (duplicate_exists != pair_at_end)
            pair.fail("list " + std::to_string(t) +
                      (duplicate_exists ? ": duplicate rank hidden from the right end"
                                        : ": right-end pair without duplicates"));
    }
}

void Auditor::check_bounds() {
    auto& vbound = check("violation_size_bounds");
    auto& rbound = check("rank_bound");
    auto& dbound = check("degree_bound");

    std::uint64_t n = rec_->size >= 0 ? static_cast<std::uint64_t>(rec_->size) : 0;
    double rhat = rec_->cfg.rank_bound_fn(n);

    auto vsize = [&](VType t) { return rec_->vlists[static_cast<int>(t)].size; };
    if (static_cast<double>(vsize(VType::A)) > rhat + 1.0)
        vbound.fail("|A| = " + std::to_string(vsize(VType::A)) + " exceeds " +
                    std::to_string(rhat + 1.0));
    if (static_cast<double>(vsize(VType::G)) > rhat + 1.0)
        vbound.fail("|G| = " + std::to_string(vsize(VType::G)) + " exceeds " +
                    std::to_string(rhat + 1.0));
    if (static_cast<double>(rec_->loss_sum) > rhat + 1.0)
        vbound.fail("loss sum = " + std::to_string(rec_->loss_sum) + " exceeds " +
                    std::to_string(rhat + 1.0));

    for (NodeRecord* node : nodes_) {
        if (is_solid(node) && static_cast<double>(integer_rank(node)) > rhat)
            rbound.fail(node_str(node) + " rank " + std::to_string(integer_rank(node)) +
                        " exceeds " + std::to_string(rhat));
    }

    if (rec_->full()) {
        // b(2n - p) <= 24 + 4 log2(2n - p) for the p-th node on the list.
        std::uint64_t p = 0;
        for (NodeRecord* x = rec_->node_list.head; x; x = x->nl_right) {
            ++p;
            std::size_t degree = 0;
            for (NodeRecord* c = x->child_head; c; c = c->sib_right) ++degree;
            double m = static_cast<double>(2 * n >= p ? 2 * n - p : 0);
            if (m < 2.0) m = 2.0;
            double limit = 24.0 + 4.0 * std::log2(m);
            if (static_cast<double>(degree) > limit)
                dbound.fail(node_str(x) + " degree " + std::to_string(degree) +
                            " exceeds " + std::to_string(limit) + " at position " +
                            std::to_string(p));
        }
    }
}

void Auditor::check_refcounts() {
    auto& refs = check("refcount_audit");
    auto& idx = check("rank_index_cache");

    // Count node references per rank entry, across live and dead records.
    std::unordered_map<const RankEntry*, std::uint64_t> holders;
    std::unordered_set<HeapRecord*> records;
    records.insert(rec_);
    for (NodeRecord* n : nodes_) {
        ++holders[n->rank];
        records.insert(n->rank->heap);
    }

    for (HeapRecord* h : records) {
        std::uint32_t pos = 0;
        for (RankEntry* e = h->rank_head; e; e = e->next, ++pos) {
            if (e->index != pos)
                idx.fail("rank entry cached index " + std::to_string(e->index) +
                         " at position " + std::to_string(pos));
            if (e->next && e->next->prev != e) refs.fail("rank list prev link broken");
            std::uint64_t expect = holders.count(e) ? holders[e] : 0;
            if (e->next) ++expect;
            if (e->refcount != expect)
                refs.fail("rank " + std::to_string(pos) + " refcount " +
                          std::to_string(e->refcount) + ", expected " + std::to_string(expect) +
                          (h->size < 0 ? " (dead record)" : ""));
            if (e->heap != h) refs.fail("rank entry heap backlink broken");
        }
    }
}

InvariantReport Auditor::run() {
    collect_forest();
    check_lists();
    if (forest_ok_) {
        check_structure();
        check_violation_lists();
        check_anchors_and_pairs();
        check_bounds();
        check_refcounts();
    }
    InvariantReport report;
    for (auto& c : checks_) report.items.push_back(std::move(c.item));
    return report;
}

}  // namespace

InvariantReport check_invariants(const Heap& heap) {
    Auditor auditor(heap);
    return auditor.run();
}

}  // namespace wcheap
