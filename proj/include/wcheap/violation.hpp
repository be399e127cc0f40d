#ifndef WCHEAP_VIOLATION_HPP
#define WCHEAP_VIOLATION_HPP

#include <optional>
#include <utility>

#include "wcheap/core.hpp"

namespace wcheap::detail {

// Insert a node into the rank-organized part of violation list `t` of the
// live heap `h`, filed under the node's current rank. Maintains the per-rank
// anchor so a same-rank pair, if any exists, sits at the organized right end.
void vl_insert(HeapRecord* h, NodeRecord* n, VType t);

// Append a loss>=2 node to L's unorganized right segment. No anchor logic.
void vl_insert_loss2(HeapRecord* h, NodeRecord* n);

// Remove a node's entry from whichever list and segment it is in. Entries of
// implicitly deferred nodes (melded-away heap) take the trivial path with no
// reorganization.
void vl_remove(HeapRecord* h, NodeRecord* n);

// Constant-work lookup of a same-rank pair in the organized part: the two
// rightmost entries form one iff any duplicate rank exists.
std::optional<std::pair<NodeRecord*, NodeRecord*>> vl_take_same_rank_pair(
    HeapRecord* h, VType t);

// Leftmost (oldest) entry of L's unorganized segment, if any.
NodeRecord* vl_peek_loss2(HeapRecord* h);

}  // namespace wcheap::detail

#endif  // WCHEAP_VIOLATION_HPP
