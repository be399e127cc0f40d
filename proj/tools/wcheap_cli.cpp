// Command-line front end: differential fuzzing, trace replay with cost
// capture, and workload benchmarks against baseline heaps.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wcheap/baselines.hpp"
#include "wcheap/heap.hpp"
#include "wcheap/key_encoding.hpp"
#include "wcheap/replay.hpp"
#include "wcheap/trace.hpp"

namespace {

using namespace wcheap;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::uint64_t env_forced_check_every(std::uint64_t requested) {
    const char* v = std::getenv("WCHEAP_CHECK");
    if (v && std::string(v) == "1") return 1;
    return requested;
}

// Self-test hook: WCHEAP_INJECT=skip-rank-decrement plants a known bug so the
// fail path (exit 1, reproducer file) can be exercised on a healthy build.
VariantConfig env_base_cfg() {
    VariantConfig cfg;
    const char* v = std::getenv("WCHEAP_INJECT");
    if (v && std::string(v) == "skip-rank-decrement") cfg.inject_skip_rank_decrement = true;
    return cfg;
}

bool parse_mix(const std::string& text, FuzzMix& mix) {
    FuzzMix out{0, 0, 0, 0};
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto colon = part.find(':');
        if (colon == std::string::npos) return false;
        std::string name = part.substr(0, colon);
        std::uint32_t weight = 0;
        try {
            weight = static_cast<std::uint32_t>(std::stoul(part.substr(colon + 1)));
        } catch (...) {
            return false;
        }
        if (name == "ins")
            out.ins = weight;
        else if (name == "delmin")
            out.delmin = weight;
        else if (name == "deckey")
            out.deckey = weight;
        else if (name == "meld")
            out.meld = weight;
        else
            return false;
    }
    if (out.ins + out.delmin + out.deckey + out.meld == 0) return false;
    mix = out;
    return true;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// --- fuzz -------------------------------------------------------------------

int cmd_fuzz(std::uint64_t seed, std::uint64_t ops, const std::string& variant_name,
             const std::string& mix_text, std::uint64_t check_every, const std::string& out) {
    Variant variant;
    if (variant_name == "full")
        variant = Variant::Full;
    else if (variant_name == "simple")
        variant = Variant::Simplified;
    else {
        std::cerr << "unknown variant: " << variant_name << "\n";
        return kExitUsage;
    }
    FuzzMix mix;
    if (!parse_mix(mix_text, mix)) {
        std::cerr << "bad mix: " << mix_text << "\n";
        return kExitUsage;
    }
    if (variant == Variant::Simplified && mix.meld > 0) {
        std::cerr << "meld weight > 0 is invalid for the simple variant\n";
        return kExitUsage;
    }

    check_every = env_forced_check_every(check_every);
    FuzzResult res = differential_fuzz(seed, ops, mix, variant, check_every, env_base_cfg());

    std::ostringstream summary;
    const auto& budget = res.result.stats.budget;
    summary << "verdict: " << (res.result.pass ? "pass" : "fail") << "\n"
            << "seed: " << seed << "\nops: " << res.result.stats.ops
            << "\ninvariant checks: " << res.result.stats.invariant_checks
            << "\nplan calls: " << budget.plan_calls
            << "\nplan budget violations: " << budget.plan_budget_violations
            << "\nstep budget violations: " << budget.step_budget_violations
            << "\nsteps applied (degree/A/G/L): " << budget.steps_applied[0] << "/"
            << budget.steps_applied[1] << "/" << budget.steps_applied[2] << "/"
            << budget.steps_applied[3] << "\nmax plan comparisons: "
            << budget.max_plan_comparisons << "\n";
    if (!res.result.pass) summary << "failure: " << res.result.message << "\n";

    if (!out.empty())
        write_text(out, summary.str());
    else
        std::cout << summary.str();

    if (!res.result.pass) {
        std::string repro = out.empty() ? "wcheap-fuzz.reproducer.trace"
                                        : out + ".reproducer.trace";
        save_trace(res.minimized, repro);
        std::cerr << "fuzz failed: " << res.result.message << "\nreproducer: " << repro << "\n";
        return kExitFail;
    }
    return kExitPass;
}

// --- replay -----------------------------------------------------------------

int cmd_replay(const std::string& trace_path, std::uint64_t check_every,
               const std::string& costs_path) {
    Trace trace;
    try {
        trace = load_trace(trace_path);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    ReplayOptions opt;
    opt.check_every = env_forced_check_every(check_every);
    opt.base_cfg = env_base_cfg();
    std::vector<CostRow> rows;
    if (!costs_path.empty()) opt.rows = &rows;

    ReplayResult res = replay_trace(trace, opt);
    if (!costs_path.empty()) write_text(costs_path, cost_rows_to_csv(rows));

    std::cout << "verdict: " << (res.pass ? "pass" : "fail") << "\n";
    if (!res.pass) std::cerr << res.message << "\n";
    return res.pass ? kExitPass : kExitFail;
}

// --- bench ------------------------------------------------------------------

// Uniform adapter so workloads are implementation-agnostic.
class HeapAdapter {
public:
    virtual ~HeapAdapter() = default;
    virtual void insert(std::int64_t value, std::uint64_t id) = 0;
    virtual Key delete_min() = 0;
    virtual void decrease_key(std::uint64_t id, std::int64_t value) = 0;
    virtual std::size_t size() const = 0;
    virtual CostCounters counters() const = 0;
};

class WcHeapAdapter : public HeapAdapter {
public:
    explicit WcHeapAdapter(Variant v) : heap_(VariantConfig{v}) {}
    void insert(std::int64_t value, std::uint64_t id) override {
        handles_[id] = heap_.insert(value, id);
    }
    Key delete_min() override {
        Key k = heap_.delete_min();
        handles_.erase(k.id);
        return k;
    }
    void decrease_key(std::uint64_t id, std::int64_t value) override {
        heap_.decrease_key(handles_.at(id), value);
    }
    std::size_t size() const override { return static_cast<std::size_t>(heap_.size()); }
    CostCounters counters() const override { return heap_.counters(); }

private:
    Heap heap_;
    std::unordered_map<std::uint64_t, NodeHandle> handles_;
};

class BinaryAdapter : public HeapAdapter {
public:
    void insert(std::int64_t value, std::uint64_t id) override { heap_.insert(value, id); }
    Key delete_min() override { return heap_.delete_min(); }
    void decrease_key(std::uint64_t id, std::int64_t value) override {
        heap_.decrease_key(id, value);
    }
    std::size_t size() const override { return heap_.size(); }
    CostCounters counters() const override { return heap_.counters(); }

private:
    BinaryHeap heap_;
};

class PairingAdapter : public HeapAdapter {
public:
    void insert(std::int64_t value, std::uint64_t id) override { heap_.insert(value, id); }
    Key delete_min() override { return heap_.delete_min(); }
    void decrease_key(std::uint64_t id, std::int64_t value) override {
        heap_.decrease_key(id, value);
    }
    std::size_t size() const override { return heap_.size(); }
    CostCounters counters() const override { return heap_.counters(); }

private:
    PairingHeap heap_;
};

struct BenchRecorder {
    std::vector<CostRow> rows;
    std::uint64_t op_index = 0;

    template <class Fn>
    void record(HeapAdapter& heap, const char* label, Fn&& fn) {
        CostRow row;
        row.op_index = op_index++;
        row.op = label;
        row.n = static_cast<std::int64_t>(heap.size());
        CostCounters before = heap.counters();
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        CostCounters after = heap.counters();
        row.comparisons = after.comparisons - before.comparisons;
        row.steps = after.structural_steps - before.structural_steps;
        row.wall_ns = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
        rows.push_back(row);
    }
};

// Seeded sparse graph; slot 0 is the source. Distance sums must agree across
// implementations.
struct DijkstraResult {
    std::int64_t distance_sum = 0;
    std::uint64_t reached = 0;
};

DijkstraResult run_dijkstra(HeapAdapter& heap, BenchRecorder& rec, std::uint64_t n,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::pair<std::uint32_t, std::int32_t>>> adj(n);
    std::uint64_t edges = 4 * n;
    for (std::uint64_t e = 0; e < edges; ++e) {
        auto u = static_cast<std::uint32_t>(rng() % n);
        auto v = static_cast<std::uint32_t>(rng() % n);
        if (u == v) continue;
        auto w = static_cast<std::int32_t>(1 + rng() % 1000);
        adj[u].push_back({v, w});
        adj[v].push_back({u, w});
    }

    constexpr std::int64_t kInf = std::int64_t{1} << 50;
    std::vector<std::int64_t> dist(n, kInf);
    std::vector<bool> done(n, false);
    for (std::uint64_t v = 0; v < n; ++v)
        rec.record(heap, "ins", [&] { heap.insert(v == 0 ? 0 : kInf, v); });
    dist[0] = 0;

    DijkstraResult out;
    for (std::uint64_t i = 0; i < n; ++i) {
        Key k{};
        rec.record(heap, "delmin", [&] { k = heap.delete_min(); });
        std::uint64_t u = k.id;
        done[u] = true;
        if (k.value >= kInf) continue;  // unreachable
        out.distance_sum += k.value;
        ++out.reached;
        for (auto [v, w] : adj[u]) {
            if (done[v]) continue;
            std::int64_t cand = k.value + w;
            if (cand < dist[v]) {
                dist[v] = cand;
                rec.record(heap, "deckey", [&] { heap.decrease_key(v, cand); });
            }
        }
    }
    return out;
}

int cmd_bench(const std::string& workload, std::uint64_t n, const std::string& impl,
              const std::string& out_path, const std::string& json_path, std::uint64_t seed) {
    std::unique_ptr<HeapAdapter> heap;
    if (impl == "wcheap-full")
        heap = std::make_unique<WcHeapAdapter>(Variant::Full);
    else if (impl == "wcheap-simple")
        heap = std::make_unique<WcHeapAdapter>(Variant::Simplified);
    else if (impl == "binary")
        heap = std::make_unique<BinaryAdapter>();
    else if (impl == "pairing")
        heap = std::make_unique<PairingAdapter>();
    else {
        std::cerr << "unknown impl: " << impl << "\n";
        return kExitUsage;
    }

    BenchRecorder rec;
    auto wall0 = std::chrono::steady_clock::now();
    DijkstraResult dj{};
    bool sorted_ok = true;

    if (workload == "sorted" || workload == "reverse" || workload == "random") {
        std::vector<std::int64_t> values(n);
        for (std::uint64_t i = 0; i < n; ++i)
            values[i] = workload == "sorted" ? static_cast<std::int64_t>(i)
                                             : static_cast<std::int64_t>(n - 1 - i);
        if (workload == "random") {
            std::mt19937_64 rng(seed);
            for (std::uint64_t i = 0; i < n; ++i) values[i] = static_cast<std::int64_t>(i);
            std::shuffle(values.begin(), values.end(), rng);
        }
        for (std::uint64_t i = 0; i < n; ++i)
            rec.record(*heap, "ins", [&] { heap->insert(values[i], i); });
        std::int64_t prev = std::numeric_limits<std::int64_t>::min();
        for (std::uint64_t i = 0; i < n; ++i) {
            Key k{};
            rec.record(*heap, "delmin", [&] { k = heap->delete_min(); });
            if (k.value < prev) sorted_ok = false;
            prev = k.value;
        }
    } else if (workload == "dijkstra") {
        dj = run_dijkstra(*heap, rec, n, seed);
    } else {
        std::cerr << "unknown workload: " << workload << "\n";
        return kExitUsage;
    }
    auto wall1 = std::chrono::steady_clock::now();

    if (!out_path.empty()) write_text(out_path, cost_rows_to_csv(rec.rows));
    if (!json_path.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rec.rows)
            j.push_back({{"op_index", r.op_index},
                         {"op", r.op},
                         {"n", r.n},
                         {"comparisons", r.comparisons},
                         {"steps", r.steps},
                         {"wall_ns", r.wall_ns}});
        write_text(json_path, j.dump(2) + "\n");
    }

    std::uint64_t total_comps = 0, max_comps = 0;
    for (const auto& r : rec.rows) {
        total_comps += r.comparisons;
        max_comps = std::max(max_comps, r.comparisons);
    }
    std::cout << "workload: " << workload << "\nimpl: " << impl << "\nn: " << n
              << "\ntotal_comparisons: " << total_comps
              << "\nmax_op_comparisons: " << max_comps << "\nwall_ms: "
              << std::chrono::duration_cast<std::chrono::milliseconds>(wall1 - wall0).count()
              << "\n";
    if (workload == "dijkstra")
        std::cout << "distance_sum: " << dj.distance_sum << "\nreached: " << dj.reached << "\n";
    else
        std::cout << "sorted: " << (sorted_ok ? "yes" : "no") << "\n";
    return sorted_ok ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"worst-case bounded decrease-key heaps: fuzz, replay, bench"};
    app.require_subcommand(1);

    // fuzz
    auto* fuzz = app.add_subcommand("fuzz", "differential fuzzing against the oracle");
    std::uint64_t seed = 1, ops = 10000, check_every = 64;
    std::string variant = "full", mix = "ins:40,delmin:25,deckey:30,meld:5", out;
    fuzz->add_option("--seed", seed);
    fuzz->add_option("--ops", ops);
    fuzz->add_option("--variant", variant);
    fuzz->add_option("--mix", mix);
    fuzz->add_option("--check-every", check_every);
    fuzz->add_option("--out", out);

    // replay
    auto* replay = app.add_subcommand("replay", "replay a trace file in lockstep");
    std::string trace_path, costs_path;
    std::uint64_t replay_check = 0;
    replay->add_option("--trace", trace_path)->required();
    replay->add_option("--check-every", replay_check);
    replay->add_option("--costs", costs_path);

    // bench
    auto* bench = app.add_subcommand("bench", "workload benchmarks");
    std::string workload = "random", impl = "wcheap-full", bench_out, bench_json;
    std::uint64_t bench_n = 1 << 10, bench_seed = 1;
    bench->add_option("--workload", workload);
    bench->add_option("--n", bench_n);
    bench->add_option("--impl", impl);
    bench->add_option("--out", bench_out);
    bench->add_option("--json", bench_json);
    bench->add_option("--seed", bench_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(fuzz))
            return cmd_fuzz(seed, ops, variant, mix, check_every, out);
        if (app.got_subcommand(replay))
            return cmd_replay(trace_path, replay_check, costs_path);
        if (app.got_subcommand(bench))
            return cmd_bench(workload, bench_n, impl, bench_out, bench_json, bench_seed);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == Error::Code::Trace ? kExitUsage : kExitFail;
    }
    return kExitUsage;
}
