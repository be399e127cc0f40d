#include <doctest.h>

#include <chrono>
#include <random>

#include "wcheap/checker.hpp"
#include "wcheap/heap.hpp"
#include "wcheap/oracle.hpp"
#include "wcheap/replay.hpp"

using namespace wcheap;
using namespace wcheap::detail;

TEST_CASE("checker passes vacuously on a fresh heap") {
    Heap h;
    InvariantReport r = check_invariants(h);
    CHECK(r.ok());
    CHECK(r.items.size() >= 15);  // the full battery ran
}

TEST_CASE("checker passes after a thousand mixed ops") {
    Heap h;
    std::mt19937_64 rng(3);
    std::vector<NodeHandle> live;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        std::uint64_t roll = rng() % 10;
        if (roll < 5 || live.empty()) {
            live.push_back(h.insert(static_cast<std::int64_t>(rng() % 4096), i));
        } else if (roll < 7) {
            h.delete_min();
            std::erase_if(live, [&](NodeHandle& handle) {
                return handle.node->generation != handle.generation;
            });
        } else {
            std::size_t j = rng() % live.size();
            std::int64_t cur = h.key_of(live[j]).value;
            h.decrease_key(live[j], cur - 1 - static_cast<std::int64_t>(rng() % 32));
        }
    }
    CHECK(check_invariants(h).ok());
}

TEST_CASE("a corrupted loss field is flagged by the bijection check") {
    Heap h;
    std::vector<NodeHandle> hs;
    for (int i = 0; i < 32; ++i) hs.push_back(h.insert(i, static_cast<std::uint64_t>(i)));
    NodeRecord* victim = nullptr;
    for (auto& handle : hs)
        if (is_rank_child(handle.node) && handle.node->loss == 0) victim = handle.node;
    REQUIRE(victim != nullptr);
    victim->loss = 1;  // corrupt: loss 1 but no L membership
    InvariantReport r = check_invariants(h);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.passed("violation_bijection"));
    victim->loss = 0;
    CHECK(check_invariants(h).ok());
}

TEST_CASE("oracle basics") {
    OracleHeap o;
    o.insert(5, 0);
    o.insert(3, 1);
    CHECK(o.delete_min().value == 3);
    CHECK(o.find_min()->value == 5);

    SUBCASE("oracle output is sorted for any input") {
        std::mt19937_64 rng(1);
        OracleHeap big;
        for (std::uint64_t i = 0; i < 2000; ++i)
            big.insert(static_cast<std::int64_t>(rng() % 100), i);
        Key prev = big.delete_min();
        while (big.size()) {
            Key next = big.delete_min();
            CHECK(key_less_raw(prev, next));
            prev = next;
        }
    }
}

TEST_CASE("oracle_apply yields the delmin/peek outputs of a trace") {
    Trace t = parse_trace_string(
        "wcheap-trace v1 seed=1 variant=full\n"
        "ins 5\n"
        "ins 3\n"
        "delmin\n"
        "segment 1\n"
        "ins 1\n"
        "end\n"
        "meld 1\n"
        "peek\n"
        "delmin\n"
        "delmin\n"
        "peek\n");
    auto outputs = oracle_apply(t);
    REQUIRE(outputs.size() == 5);
    CHECK(outputs[0].key.value == 3);   // delmin
    CHECK(outputs[1].key.value == 1);   // peek after meld
    CHECK(outputs[2].key.value == 1);   // delmin
    CHECK(outputs[3].key.value == 5);   // delmin
    CHECK_FALSE(outputs[4].present);    // peek on empty

    // The heap under test produces the same outputs (differential check).
    CHECK(replay_trace(t, ReplayOptions{}).pass);
}

TEST_CASE("oracle handles 100k ops in under a second") {
    auto t0 = std::chrono::steady_clock::now();
    OracleHeap o;
    std::mt19937_64 rng(2);
    for (std::uint64_t i = 0; i < 50000; ++i) o.insert(static_cast<std::int64_t>(rng()), i);
    for (int i = 0; i < 50000; ++i) o.delete_min();
    auto elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() < 1000);
}

TEST_CASE("differential fuzz passes on a correct build") {
    FuzzMix mix;
    SUBCASE("full variant, default checking cadence") {
        auto r = differential_fuzz(1, 10000, mix, Variant::Full, 64);
        CHECK(r.result.pass);
        CHECK(r.result.stats.budget.plan_budget_violations == 0);
        CHECK(r.result.stats.budget.step_budget_violations == 0);
    }
    SUBCASE("slow mode: invariants after every op") {
        auto r = differential_fuzz(1, 1500, mix, Variant::Full, 1);
        CHECK(r.result.pass);
    }
    SUBCASE("simplified variant") {
        FuzzMix no_meld = mix;
        no_meld.meld = 0;
        auto r = differential_fuzz(1, 10000, no_meld, Variant::Simplified, 64);
        CHECK(r.result.pass);
        CHECK(r.result.stats.budget.plan_budget_violations == 0);
        CHECK(r.result.stats.budget.step_budget_violations == 0);
    }
}

TEST_CASE("an injected rank-decrement bug is caught and shrunk to a reproducer") {
    VariantConfig cfg;
    cfg.inject_skip_rank_decrement = true;
    auto r = differential_fuzz(3, 4000, FuzzMix{}, Variant::Full, 16, cfg);
    REQUIRE_FALSE(r.result.pass);
    CHECK(r.minimized.items.size() > 0);
    CHECK(r.minimized.items.size() <= r.trace.items.size());

    // The reproducer replays to the same verdict through the text format.
    ReplayOptions opt;
    opt.check_every = 16;
    opt.base_cfg = cfg;
    Trace reparsed = parse_trace_string(serialize_trace(r.minimized));
    CHECK_FALSE(replay_trace(reparsed, opt).pass);

    // And passes on a correct build: the bug is in the heap, not the trace.
    ReplayOptions clean = opt;
    clean.base_cfg = VariantConfig{};
    CHECK(replay_trace(reparsed, clean).pass);
}

TEST_CASE("insert comparison envelope is flat across sizes") {
    // All-insert traces: the per-op comparison maximum saturates within the
    // first thousand ops and must not grow with n after that.
    std::vector<std::uint64_t> maxima;
    for (std::uint64_t n : {1024u, 4096u, 16384u}) {
        Trace t;
        t.variant = Variant::Full;
        std::mt19937_64 rng(7);
        for (std::uint64_t i = 0; i < n; ++i) {
            TraceOp op;
            op.kind = OpKind::Insert;
            op.value = static_cast<std::int64_t>(rng() % 100000);
            op.node_index = i;
            t.items.push_back({false, op, 0});
        }
        CostSummary s = measure_costs(t);
        REQUIRE(s.pass);
        maxima.push_back(s.max_comparisons["ins"]);
        CHECK(s.budget.plan_budget_violations == 0);
    }
    CHECK(maxima[0] == maxima[1]);
    CHECK(maxima[1] == maxima[2]);
}

TEST_CASE("measured plan budgets hold on random traces") {
    for (Variant v : {Variant::Full, Variant::Simplified}) {
        FuzzMix mix;
        if (v == Variant::Simplified) mix.meld = 0;
        auto r = differential_fuzz(11, 6000, mix, v, 0);
        REQUIRE(r.result.pass);
        CostSummary s = measure_costs(r.trace);
        CHECK(s.pass);
        CHECK(s.budget.plan_budget_violations == 0);
        CHECK(s.budget.step_budget_violations == 0);
        if (v == Variant::Full) CHECK(s.c1 >= 0.0);
    }
}

TEST_CASE("replay cost rows are deterministic") {
    FuzzMix mix;
    auto r = differential_fuzz(21, 3000, mix, Variant::Full, 0);
    REQUIRE(r.result.pass);

    auto csv_without_wall = [&](const Trace& t) {
        std::vector<CostRow> rows;
        measure_costs(t, &rows);
        for (auto& row : rows) row.wall_ns = 0;
        return cost_rows_to_csv(rows);
    };
    std::string a = csv_without_wall(r.trace);
    std::string b = csv_without_wall(r.trace);
    CHECK(a == b);
    CHECK(a.substr(0, a.find('\n')) == "op_index,op,n,comparisons,steps,wall_ns");
}
