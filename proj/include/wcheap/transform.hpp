#ifndef WCHEAP_TRANSFORM_HPP
#define WCHEAP_TRANSFORM_HPP

#include "wcheap/core.hpp"
#include "wcheap/violation.hpp"

namespace wcheap::detail {

struct StepOutcome {
    bool applied = false;
    std::uint64_t comparisons = 0;
    std::int64_t d_loss_sum = 0;
    std::int64_t d_a = 0;
    std::int64_t d_g = 0;
};

enum StepKind : int { kStepDegree = 0, kStepA = 1, kStepG = 2, kStepL = 3 };

// Converts an implicitly deferred node (melded-away heap) to explicitly
// deferred: lingering violation entry dropped trivially, loss zeroed, rank
// re-pointed to the current heap's rank 0. May reclaim the dead record.
void make_explicit_deferred(HeapRecord* h, NodeRecord* n);

// Converts a deferred tree root (either kind) to a solid one and registers
// it as a rank root (G in the full variant, A in the simplified one).
void make_solid_root(HeapRecord* h, NodeRecord* n);

// Cuts child c from its parent onto the root list; a removed rank edge
// decrements the parent's rank with violation bookkeeping.
void remove_child(HeapRecord* h, NodeRecord* c);

void rank_decrement(HeapRecord* h, NodeRecord* p, DecrementCause cause);
void rank_increment_rank_root(HeapRecord* h, NodeRecord* s);

// Compares the two solid nodes (1 counted comparison), cuts the loser from
// its parent or the root list and attaches it under the winner: a rank edge
// when the ranks were equal, a nonrank edge otherwise. Returns the winner.
NodeRecord* link_nodes(HeapRecord* h, NodeRecord* a, NodeRecord* b);

// Bundles a node's three rightmost deferred children into a small solid
// structure hung back as a nonrank child, cutting the degree by 2.
StepOutcome degree_reduction_step(HeapRecord* h, NodeRecord* x);

StepOutcome reduction_step_a(HeapRecord* h);
StepOutcome reduction_step_g(HeapRecord* h);
StepOutcome reduction_step_l(HeapRecord* h);

// After a heap-size decrement: twice take the node list front, run two
// degree reductions on it and cycle it to the end.
void node_list_maintenance(HeapRecord* h);

}  // namespace wcheap::detail

#endif  // WCHEAP_TRANSFORM_HPP
