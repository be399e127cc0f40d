#include <doctest.h>

#include "wcheap/replay.hpp"
#include "wcheap/trace.hpp"

using namespace wcheap;

TEST_CASE("trace files parse and reserialize byte-identically") {
    std::string text =
        "wcheap-trace v1 seed=42 variant=full\n"
        "ins 5\n"
        "ins 3\n"
        "segment 1\n"
        "ins 7\n"
        "delmin\n"
        "ins 2\n"
        "end\n"
        "peek\n"
        "meld 1\n"
        "deckey 0 -10\n"
        "delmin\n";
    Trace t = parse_trace_string(text);
    CHECK(t.seed == 42);
    CHECK(t.variant == Variant::Full);
    CHECK(t.segments.size() == 1);
    CHECK(t.segments[0].ops.size() == 3);
    CHECK(serialize_trace(t) == text);

    // Node indices follow file order of the ins lines.
    CHECK(t.items[0].op.node_index == 0);
    CHECK(t.items[1].op.node_index == 1);
    CHECK(t.segments[0].ops[0].node_index == 2);
    CHECK(t.segments[0].ops[2].node_index == 3);

    ReplayOptions opt;
    opt.check_every = 1;
    ReplayResult res = replay_trace(t, opt);
    CHECK(res.pass);
}

TEST_CASE("generated fuzz traces round-trip through the canonical form") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto r = differential_fuzz(seed, 1200, FuzzMix{}, Variant::Full, 0);
        REQUIRE(r.result.pass);
        std::string once = serialize_trace(r.trace);
        Trace reparsed = parse_trace_string(once);
        CHECK(serialize_trace(reparsed) == once);
        CHECK(replay_trace(reparsed, ReplayOptions{}).pass);
    }
}

TEST_CASE("parse errors carry line numbers") {
    auto expect_error = [](const std::string& text, const char* needle) {
        try {
            parse_trace_string(text);
            FAIL_CHECK("expected a parse error for: " << needle);
        } catch (const Error& e) {
            CHECK(e.code() == Error::Code::Trace);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_error("bogus\n", "line 1");
    expect_error("wcheap-trace v1 seed=1 variant=full\nnonsense\n", "line 2");
    expect_error("wcheap-trace v1 seed=1 variant=quick\n", "variant");
    expect_error("wcheap-trace v1 seed=1 variant=full\nins\n", "line 2");
    expect_error("wcheap-trace v1 seed=1 variant=full\nmeld 1\n", "undefined segment");
    expect_error(
        "wcheap-trace v1 seed=1 variant=full\nsegment 1\nins 1\nend\nsegment 1\nend\n",
        "duplicate segment");
    expect_error("wcheap-trace v1 seed=1 variant=full\nsegment 1\nins 1\n", "unterminated");
    expect_error("wcheap-trace v1 seed=1 variant=full\nsegment 1\nmeld 2\nend\n",
                 "meld inside a segment");
    expect_error("wcheap-trace v1 seed=1 variant=simple\nsegment 1\nins 1\nend\nmeld 1\n",
                 "simplified");
}

TEST_CASE("malformed but well-formed-looking traces fail at replay time") {
    // deckey of a deleted node
    std::string text =
        "wcheap-trace v1 seed=1 variant=full\n"
        "ins 5\n"
        "delmin\n"
        "deckey 0 1\n";
    Trace t = parse_trace_string(text);
    CHECK_THROWS_AS(replay_trace(t, ReplayOptions{}), Error);

    // delmin on empty heap
    Trace t2 = parse_trace_string("wcheap-trace v1 seed=1 variant=full\ndelmin\n");
    CHECK_THROWS_AS(replay_trace(t2, ReplayOptions{}), Error);

    // melding the same segment twice
    Trace t3 = parse_trace_string(
        "wcheap-trace v1 seed=1 variant=full\nsegment 1\nins 1\nend\nmeld 1\nmeld 1\n");
    CHECK_THROWS_AS(replay_trace(t3, ReplayOptions{}), Error);
}
