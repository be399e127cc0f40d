#include <doctest.h>

#include <map>
#include <random>
#include <vector>

#include "wcheap/core.hpp"
#include "wcheap/violation.hpp"

using namespace wcheap;
using namespace wcheap::detail;

namespace {

struct Fixture {
    HeapRecord* rec;
    Fixture() { rec = make_record(VariantConfig{Variant::Full}); }
    ~Fixture() {
        // Free lingering entries before tearing the record down.
        for (int t = 0; t < 3; ++t) {
            auto drop = [&](VEntryList& list) {
                while (list.head) {
                    ViolationEntry* e = list.head;
                    if (e->rank_entry) {
                        auto*& anchor = e->rank_entry->anchor[static_cast<int>(e->vtype)];
                        if (anchor == e) anchor = nullptr;
                    }
                    list.remove(e);
                    e->node->violation = nullptr;
                    delete e;
                }
            };
            drop(rec->vlists[t].organized);
            drop(rec->vlists[t].unorganized);
            rec->vlists[t].size = 0;
        }
        destroy_record(rec);
    }

    NodeRecord* node_at_rank(std::uint32_t rank, std::int64_t value = 0) {
        NodeRecord* n = new_node(rec, value);
        for (std::uint32_t i = 0; i < rank; ++i) rank_shift(rec, n, +1);
        return n;
    }

    std::vector<ViolationEntry*> organized(VType t) {
        std::vector<ViolationEntry*> out;
        rec->vlists[static_cast<int>(t)].organized.for_each(
            [&](ViolationEntry* e) { out.push_back(e); });
        return out;
    }

    // Brute-force oracle: a duplicate rank exists in the organized part iff
    // the two rightmost entries share a rank.
    bool pair_property(VType t) {
        auto entries = organized(t);
        std::map<RankEntry*, int> counts;
        for (auto* e : entries) ++counts[e->rank_entry];
        bool dup = false;
        for (auto& [re, c] : counts)
            if (c >= 2) dup = true;
        bool right_end_pair = entries.size() >= 2 &&
                              entries[entries.size() - 1]->rank_entry ==
                                  entries[entries.size() - 2]->rank_entry;
        return dup == right_end_pair;
    }
};

}  // namespace

TEST_CASE("first entry of a rank becomes the anchor at the left end") {
    Fixture f;
    NodeRecord* a = f.node_at_rank(3);
    NodeRecord* pre = f.node_at_rank(1);
    vl_insert(f.rec, pre, VType::A);
    vl_insert(f.rec, a, VType::A);
    auto entries = f.organized(VType::A);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0]->node == a);  // left end
    CHECK(a->rank->anchor[0] == entries[0]);
}

TEST_CASE("second entry of a rank forms a pair at the right end") {
    Fixture f;
    NodeRecord* other = f.node_at_rank(1);
    NodeRecord* a = f.node_at_rank(3);
    NodeRecord* b = f.node_at_rank(3, 1);
    vl_insert(f.rec, a, VType::A);
    vl_insert(f.rec, other, VType::A);
    vl_insert(f.rec, b, VType::A);
    auto entries = f.organized(VType::A);
    REQUIRE(entries.size() == 3);
    // anchor (a) moved to the right end, b right of it
    CHECK(entries[0]->node == other);
    CHECK(entries[1]->node == a);
    CHECK(entries[2]->node == b);
    auto pair = vl_take_same_rank_pair(f.rec, VType::A);
    REQUIRE(pair.has_value());
    CHECK(((pair->first == a && pair->second == b) || (pair->first == b && pair->second == a)));
}

TEST_CASE("take_same_rank_pair finds the duplicate among distinct ranks") {
    Fixture f;
    std::vector<NodeRecord*> ns;
    for (std::uint32_t r : {0u, 1u, 2u}) {
        ns.push_back(f.node_at_rank(r));
        vl_insert(f.rec, ns.back(), VType::A);
    }
    CHECK_FALSE(vl_take_same_rank_pair(f.rec, VType::A).has_value());

    NodeRecord* dup = f.node_at_rank(1, 7);
    vl_insert(f.rec, dup, VType::A);
    auto pair = vl_take_same_rank_pair(f.rec, VType::A);
    REQUIRE(pair.has_value());
    CHECK(pair->first->rank == pair->second->rank);
    CHECK(pair->first->rank->index == 1);
}

TEST_CASE("removal keeps the pair-at-right-end property") {
    Fixture f;
    NodeRecord* a = f.node_at_rank(2);
    NodeRecord* b = f.node_at_rank(2, 1);
    NodeRecord* c = f.node_at_rank(5, 2);
    NodeRecord* d = f.node_at_rank(5, 3);
    for (NodeRecord* n : {a, b, c, d}) vl_insert(f.rec, n, VType::G);
    // organized: [a b c d] with pairs (a,b) and (c,d); right end pair (c,d)
    vl_remove(f.rec, d);
    CHECK(f.pair_property(VType::G));
    auto pair = vl_take_same_rank_pair(f.rec, VType::G);
    REQUIRE(pair.has_value());  // (a,b) must be discoverable again
    CHECK(pair->first->rank->index == 2);
    vl_remove(f.rec, b);
    CHECK(f.pair_property(VType::G));
    CHECK_FALSE(vl_take_same_rank_pair(f.rec, VType::G).has_value());
}

TEST_CASE("removing the sole entry clears the anchor") {
    Fixture f;
    NodeRecord* a = f.node_at_rank(4);
    vl_insert(f.rec, a, VType::A);
    vl_remove(f.rec, a);
    CHECK(f.organized(VType::A).empty());
    CHECK(a->rank->anchor[0] == nullptr);
    CHECK(a->violation == nullptr);
    CHECK_THROWS_AS(vl_remove(f.rec, a), Error);  // no entry any more
}

TEST_CASE("double insertion is a contract violation") {
    Fixture f;
    NodeRecord* a = f.node_at_rank(1);
    vl_insert(f.rec, a, VType::A);
    CHECK_THROWS_AS(vl_insert(f.rec, a, VType::A), Error);
}

TEST_CASE("10k random insert/remove ops keep the pair property") {
    Fixture f;
    std::mt19937_64 rng(7);
    std::vector<NodeRecord*> in_list;
    std::vector<NodeRecord*> out_list;
    for (int i = 0; i < 48; ++i) out_list.push_back(f.node_at_rank(rng() % 8, i));

    for (int step = 0; step < 10000; ++step) {
        bool do_insert = in_list.empty() || (!out_list.empty() && rng() % 2 == 0);
        if (do_insert) {
            std::size_t i = rng() % out_list.size();
            NodeRecord* n = out_list[i];
            out_list.erase(out_list.begin() + static_cast<std::ptrdiff_t>(i));
            vl_insert(f.rec, n, VType::A);
            in_list.push_back(n);
        } else {
            std::size_t i = rng() % in_list.size();
            NodeRecord* n = in_list[i];
            in_list.erase(in_list.begin() + static_cast<std::ptrdiff_t>(i));
            vl_remove(f.rec, n);
            out_list.push_back(n);
        }
        REQUIRE(f.pair_property(VType::A));
        // take must agree with the brute-force duplicate scan
        std::map<RankEntry*, int> counts;
        for (auto* e : f.organized(VType::A)) ++counts[e->rank_entry];
        bool dup = false;
        for (auto& [re, c] : counts)
            if (c >= 2) dup = true;
        REQUIRE(vl_take_same_rank_pair(f.rec, VType::A).has_value() == dup);
    }
}

TEST_CASE("loss >= 2 entries live in the unorganized right segment") {
    Fixture f;
    NodeRecord* a = f.node_at_rank(2);
    a->loss = 1;
    vl_insert(f.rec, a, VType::L);

    SUBCASE("take_loss2 after one insert returns that node") {
        NodeRecord* b = f.node_at_rank(3, 1);
        b->loss = 2;
        vl_insert_loss2(f.rec, b);
        CHECK(vl_peek_loss2(f.rec) == b);
        CHECK(b->violation->rank_entry == nullptr);
    }

    SUBCASE("loss 1 to 2 transition moves the entry between segments") {
        vl_remove(f.rec, a);
        a->loss = 2;
        vl_insert_loss2(f.rec, a);
        CHECK(f.organized(VType::L).empty());
        CHECK(vl_peek_loss2(f.rec) == a);
    }

    SUBCASE("interleaved loss-1 and loss-2 insertions stay segmented") {
        std::vector<NodeRecord*> loss1{a}, loss2;
        for (int i = 0; i < 6; ++i) {
            NodeRecord* n = f.node_at_rank(i % 4, 10 + i);
            if (i % 2 == 0) {
                n->loss = 2;
                vl_insert_loss2(f.rec, n);
                loss2.push_back(n);
            } else {
                n->loss = 1;
                vl_insert(f.rec, n, VType::L);
                loss1.push_back(n);
            }
        }
        for (NodeRecord* n : loss1) CHECK(n->violation->rank_entry != nullptr);
        for (NodeRecord* n : loss2) CHECK(n->violation->rank_entry == nullptr);
        std::size_t org = 0, unorg = 0;
        f.rec->vlists[2].organized.for_each([&](ViolationEntry*) { ++org; });
        f.rec->vlists[2].unorganized.for_each([&](ViolationEntry*) { ++unorg; });
        CHECK(org == loss1.size());
        CHECK(unorg == loss2.size());
    }
}
