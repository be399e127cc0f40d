#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "wcheap/baselines.hpp"
#include "wcheap/heap.hpp"

using namespace wcheap;

namespace {

template <class HeapT>
std::vector<std::int64_t> drain(HeapT& h) {
    std::vector<std::int64_t> out;
    while (h.size() > 0) out.push_back(h.delete_min().value);
    return out;
}

}  // namespace

TEST_CASE("baseline heaps sort like std::sort") {
    std::mt19937_64 rng(17);
    std::vector<std::int64_t> values(2000);
    for (auto& v : values) v = static_cast<std::int64_t>(rng() % 1000);
    std::vector<std::int64_t> expect = values;
    std::sort(expect.begin(), expect.end());

    BinaryHeap bin;
    PairingHeap pair;
    for (std::uint64_t i = 0; i < values.size(); ++i) {
        bin.insert(values[i], i);
        pair.insert(values[i], i);
    }
    CHECK(drain(bin) == expect);
    CHECK(drain(pair) == expect);
    CHECK(bin.counters().comparisons > 0);
    CHECK(pair.counters().comparisons > 0);
}

TEST_CASE("baseline decrease_key agrees with re-sorting") {
    std::mt19937_64 rng(18);
    std::vector<std::int64_t> values(500);
    for (auto& v : values) v = 1000 + static_cast<std::int64_t>(rng() % 1000);

    BinaryHeap bin;
    PairingHeap pair;
    for (std::uint64_t i = 0; i < values.size(); ++i) {
        bin.insert(values[i], i);
        pair.insert(values[i], i);
    }
    for (int round = 0; round < 300; ++round) {
        std::uint64_t id = rng() % values.size();
        std::int64_t nv = values[id] - 1 - static_cast<std::int64_t>(rng() % 50);
        values[id] = nv;
        bin.decrease_key(id, nv);
        pair.decrease_key(id, nv);
    }
    std::vector<std::int64_t> expect = values;
    std::sort(expect.begin(), expect.end());
    CHECK(drain(bin) == expect);
    CHECK(drain(pair) == expect);
}

TEST_CASE("dijkstra distance sums agree across all four implementations") {
    // Mirrors the CLI's dijkstra workload on a seeded sparse graph.
    constexpr std::uint64_t n = 600;
    constexpr std::uint64_t kSeed = 5;
    std::mt19937_64 rng(kSeed);
    std::vector<std::vector<std::pair<std::uint32_t, std::int32_t>>> adj(n);
    for (std::uint64_t e = 0; e < 4 * n; ++e) {
        auto u = static_cast<std::uint32_t>(rng() % n);
        auto v = static_cast<std::uint32_t>(rng() % n);
        if (u == v) continue;
        auto w = static_cast<std::int32_t>(1 + rng() % 1000);
        adj[u].push_back({v, w});
        adj[v].push_back({u, w});
    }
    constexpr std::int64_t kInf = std::int64_t{1} << 50;

    auto run = [&](auto& heap) -> std::int64_t {
        std::vector<std::int64_t> dist(n, kInf);
        std::vector<bool> done(n, false);
        for (std::uint64_t v = 0; v < n; ++v) heap.insert(v == 0 ? 0 : kInf, v);
        dist[0] = 0;
        std::int64_t sum = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            Key k = heap.delete_min();
            done[k.id] = true;
            if (k.value >= kInf) continue;
            sum += k.value;
            for (auto [v, w] : adj[k.id]) {
                if (done[v]) continue;
                std::int64_t cand = k.value + w;
                if (cand < dist[v]) {
                    dist[v] = cand;
                    heap.decrease_key(v, cand);
                }
            }
        }
        return sum;
    };

    struct WcAdapter {
        Heap heap;
        std::vector<NodeHandle> handles;
        explicit WcAdapter(Variant v) : heap(VariantConfig{v}), handles(n) {}
        void insert(std::int64_t value, std::uint64_t id) { handles[id] = heap.insert(value, id); }
        Key delete_min() { return heap.delete_min(); }
        void decrease_key(std::uint64_t id, std::int64_t value) {
            heap.decrease_key(handles[id], value);
        }
    };

    BinaryHeap bin;
    PairingHeap pair;
    WcAdapter full(Variant::Full);
    WcAdapter simple(Variant::Simplified);

    std::int64_t s1 = run(bin);
    std::int64_t s2 = run(pair);
    std::int64_t s3 = run(full);
    std::int64_t s4 = run(simple);
    CHECK(s1 == s2);
    CHECK(s1 == s3);
    CHECK(s1 == s4);
    CHECK(s1 > 0);
}
