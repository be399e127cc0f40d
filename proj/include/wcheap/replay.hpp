#ifndef WCHEAP_REPLAY_HPP
#define WCHEAP_REPLAY_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wcheap/checker.hpp"
#include "wcheap/heap.hpp"
#include "wcheap/oracle.hpp"
#include "wcheap/trace.hpp"

namespace wcheap {

struct CostRow {
    std::uint64_t op_index = 0;
    const char* op = "";
    std::int64_t n = 0;  // heap size at op start
    std::uint64_t comparisons = 0;
    std::uint64_t steps = 0;
    std::uint64_t l = 0, a = 0, g = 0;  // reduction plan consumed by the op
    std::uint64_t wall_ns = 0;
};

struct ReplayStats {
    std::uint64_t ops = 0;
    std::uint64_t invariant_checks = 0;
    std::map<std::string, std::uint64_t> invariant_failures;
    detail::BudgetStats budget;  // aggregated over all heaps of the run
};

struct ReplayResult {
    bool pass = true;
    std::string message;
    std::size_t fail_op = 0;  // ordinal of the failing executed op
    ReplayStats stats;
};

struct ReplayOptions {
    std::uint64_t check_every = 0;  // 0: only at the end
    bool check_at_end = true;
    std::vector<CostRow>* rows = nullptr;
    VariantConfig base_cfg;  // variant field is overridden by the trace
};

// Replays a trace on the heap and the brute-force oracle in lockstep,
// comparing every output and optionally auditing invariants every
// `check_every` executed ops.
ReplayResult replay_trace(const Trace& trace, const ReplayOptions& opt);

// Runs a trace on the reference model alone and returns the outputs of its
// delmin and peek ops in order. Missing peeks come back as value 0/id 0 with
// present=false.
struct OracleOutput {
    bool present = false;
    Key key;
};
std::vector<OracleOutput> oracle_apply(const Trace& trace);

struct FuzzMix {
    std::uint32_t ins = 40;
    std::uint32_t delmin = 25;
    std::uint32_t deckey = 30;
    std::uint32_t meld = 5;
};

struct FuzzResult {
    ReplayResult result;
    Trace trace;      // the generated trace
    Trace minimized;  // shrunk reproducer, valid when !result.pass
};

// Generates a trace from the seed and mix, executing it in lockstep as it
// grows. On failure the trace is shrunk by suffix truncation followed by
// greedy op deletion.
FuzzResult differential_fuzz(std::uint64_t seed, std::uint64_t n_ops, const FuzzMix& mix,
                             Variant variant, std::uint64_t check_every,
                             const VariantConfig& base_cfg = {});

struct CostSummary {
    std::map<std::string, std::uint64_t> max_comparisons;
    std::map<std::string, std::uint64_t> max_steps;
    double c1 = 0.0, c2 = 0.0;  // delete_min envelope c1*log2(n+2)+c2
    detail::BudgetStats budget;
    bool pass = true;
    std::string message;
};

// Replays a trace collecting per-op cost rows, then summarizes worst-case
// envelopes and verifies the plan/step comparison budgets were respected.
CostSummary measure_costs(const Trace& trace, std::vector<CostRow>* rows_out = nullptr,
                          const VariantConfig& base_cfg = {});

std::string cost_rows_to_csv(const std::vector<CostRow>& rows);

}  // namespace wcheap

#endif  // WCHEAP_REPLAY_HPP
