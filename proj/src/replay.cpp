#include "wcheap/replay.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace wcheap {

namespace {

const char* op_label(OpKind k) {
    switch (k) {
        case OpKind::Insert: return "ins";
        case OpKind::DeleteMin: return "delmin";
        case OpKind::DecreaseKey: return "deckey";
        case OpKind::Meld: return "meld";
        case OpKind::Peek: return "peek";
    }
    return "?";
}

[[noreturn]] void malformed(const std::string& msg) {
    throw Error(Error::Code::Trace, "malformed trace: " + msg);
}

std::string key_str(const Key& k) {
    return "(" + std::to_string(k.value) + "," + std::to_string(k.id) + ")";
}

// Drives one heap/oracle pair through trace ops, comparing outputs and
// running the invariant auditor at checkpoints.
class LockstepRunner {
public:
    LockstepRunner(Variant variant, const ReplayOptions& opt)
        : opt_(opt), cfg_(opt.base_cfg) {
        cfg_.variant = variant;
        main_ = std::make_unique<Heap>(cfg_);
    }

    bool exec_main(const TraceOp& op, const std::vector<TraceSegment>& segments) {
        if (op.kind == OpKind::Meld) {
            const TraceSegment* seg = nullptr;
            for (const auto& s : segments)
                if (s.id == op.segment_id) seg = &s;
            if (!seg) malformed("meld of undefined segment");
            return exec_meld(*seg);
        }
        return exec_plain(op, *main_, main_oracle_, /*owner=*/0);
    }

    bool finish() {
        if (result_.pass && opt_.check_at_end && !audit(*main_)) return false;
        result_.stats.budget = main_->budget_stats();
        return result_.pass;
    }

    ReplayResult&& take_result() { return std::move(result_); }
    Heap& main_heap() { return *main_; }
    const OracleHeap& main_oracle() const { return main_oracle_; }

private:
    struct Target {
        NodeHandle handle;
        std::int32_t owner = 0;  // 0 main, >0 segment id, -1 deleted
    };

    bool fail(const std::string& msg) {
        result_.pass = false;
        result_.message = msg;
        result_.fail_op = result_.stats.ops;
        return false;
    }

    bool audit(const Heap& heap) {
        ++result_.stats.invariant_checks;
        InvariantReport report = check_invariants(heap);
        if (report.ok()) return true;
        for (const auto& item : report.items)
            if (!item.pass) ++result_.stats.invariant_failures[item.name];
        return fail("invariant failure after op " + std::to_string(result_.stats.ops) + ": " +
                    report.first_failure());
    }

    bool checkpoint(const Heap& heap) {
        ++result_.stats.ops;
        if (opt_.check_every && result_.stats.ops % opt_.check_every == 0)
            return audit(heap);
        return true;
    }

    bool exec_plain(const TraceOp& op, Heap& heap, OracleHeap& oracle, std::int32_t owner) {
        CostRow row;
        row.op_index = result_.stats.ops;
        row.op = op_label(op.kind);
        row.n = heap.size();
        CostCounters before = heap.counters();
        auto t0 = std::chrono::steady_clock::now();

        switch (op.kind) {
            case OpKind::Insert: {
                NodeHandle h = heap.insert(op.value, op.node_index);
                oracle.insert(op.value, op.node_index);
                targets_[op.node_index] = Target{h, owner};
                if (owner > 0) segment_members_[static_cast<std::uint32_t>(owner)].push_back(
                    op.node_index);
                break;
            }
            case OpKind::DeleteMin: {
                if (oracle.size() == 0) malformed("delmin on empty heap");
                Key got = heap.delete_min();
                Key want = oracle.delete_min();
                targets_[got.id].owner = -1;
                if (!(got == want))
                    return fail("delete_min mismatch: heap " + key_str(got) + ", oracle " +
                                key_str(want));
                break;
            }
            case OpKind::DecreaseKey: {
                auto it = targets_.find(op.node_index);
                if (it == targets_.end() || it->second.owner != owner)
                    malformed("deckey target not in this heap");
                if (!oracle.contains(op.node_index)) malformed("deckey target deleted");
                if (op.value >= oracle.value_of(op.node_index))
                    malformed("deckey value not decreasing");
                heap.decrease_key(it->second.handle, op.value);
                oracle.decrease_key(op.node_index, op.value);
                break;
            }
            case OpKind::Peek: {
                auto got = heap.find_min();
                auto want = oracle.find_min();
                bool same = got.has_value() == want.has_value() && (!got || *got == *want);
                if (!same)
                    return fail("peek mismatch: heap " + (got ? key_str(*got) : "empty") +
                                ", oracle " + (want ? key_str(*want) : "empty"));
                break;
            }
            case OpKind::Meld:
                malformed("meld inside a segment");
        }

        if (opt_.rows) {
            auto t1 = std::chrono::steady_clock::now();
            CostCounters after = heap.counters();
            row.comparisons = after.comparisons - before.comparisons;
            row.steps = after.structural_steps - before.structural_steps;
            const auto& consumed = heap.last_consumed();
            row.l = consumed.l;
            row.a = consumed.a;
            row.g = consumed.g;
            row.wall_ns = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
            opt_.rows->push_back(row);
        }
        return checkpoint(heap);
    }

    bool exec_meld(const TraceSegment& seg) {
        if (!built_segments_.insert(seg.id).second) malformed("segment melded twice");

        auto seg_heap = std::make_unique<Heap>(cfg_);
        OracleHeap seg_oracle;
        for (const auto& op : seg.ops) {
            if (!exec_plain(op, *seg_heap, seg_oracle, static_cast<std::int32_t>(seg.id)))
                return false;
        }

        CostRow row;
        row.op_index = result_.stats.ops;
        row.op = "meld";
        row.n = main_->size();
        CostCounters main_before = main_->counters();
        CostCounters seg_before = seg_heap->counters();
        auto t0 = std::chrono::steady_clock::now();

        Heap& winner = Heap::meld(*main_, *seg_heap);
        bool seg_won = (&winner == seg_heap.get());
        if (seg_won) main_ = std::move(seg_heap);
        main_oracle_.meld_from(seg_oracle);
        for (std::uint64_t idx : segment_members_[seg.id]) {
            auto it = targets_.find(idx);
            if (it != targets_.end() && it->second.owner == static_cast<std::int32_t>(seg.id))
                it->second.owner = 0;
        }
        segment_members_.erase(seg.id);

        if (opt_.rows) {
            auto t1 = std::chrono::steady_clock::now();
            CostCounters after = main_->counters();
            // The loser's counters freeze at meld time; the winner's delta is
            // the full cost of the operation.
            CostCounters before = seg_won ? seg_before : main_before;
            row.comparisons = after.comparisons - before.comparisons;
            row.steps = after.structural_steps - before.structural_steps;
            const auto& consumed = main_->last_consumed();
            row.l = consumed.l;
            row.a = consumed.a;
            row.g = consumed.g;
            row.wall_ns = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
            opt_.rows->push_back(row);
        }
        return checkpoint(*main_);
    }

    ReplayOptions opt_;
    VariantConfig cfg_;
    std::unique_ptr<Heap> main_;
    OracleHeap main_oracle_;
    std::unordered_map<std::uint64_t, Target> targets_;
    std::unordered_map<std::uint32_t, std::vector<std::uint64_t>> segment_members_;
    std::unordered_set<std::uint32_t> built_segments_;
    ReplayResult result_;
};

}  // namespace

ReplayResult replay_trace(const Trace& trace, const ReplayOptions& opt) {
    LockstepRunner runner(trace.variant, opt);
    for (const auto& item : trace.items) {
        if (item.is_segment) continue;  // definitions run at their meld op
        if (!runner.exec_main(item.op, trace.segments)) break;
    }
    runner.finish();
    return runner.take_result();
}

std::vector<OracleOutput> oracle_apply(const Trace& trace) {
    std::vector<OracleOutput> out;
    OracleHeap main;
    std::unordered_set<std::uint32_t> melded;
    auto run_op = [&](OracleHeap& oracle, const TraceOp& op) {
        switch (op.kind) {
            case OpKind::Insert:
                oracle.insert(op.value, op.node_index);
                break;
            case OpKind::DeleteMin:
                if (oracle.size() == 0) malformed("delmin on empty heap");
                out.push_back({true, oracle.delete_min()});
                break;
            case OpKind::DecreaseKey:
                if (!oracle.contains(op.node_index)) malformed("deckey target missing");
                oracle.decrease_key(op.node_index, op.value);
                break;
            case OpKind::Peek: {
                auto min = oracle.find_min();
                out.push_back({min.has_value(), min ? *min : Key{}});
                break;
            }
            case OpKind::Meld:
                malformed("meld inside a segment");
        }
    };
    for (const auto& item : trace.items) {
        if (item.is_segment) continue;
        if (item.op.kind == OpKind::Meld) {
            const TraceSegment* seg = trace.segment_by_id(item.op.segment_id);
            if (!seg) malformed("meld of undefined segment");
            if (!melded.insert(seg->id).second) malformed("segment melded twice");
            OracleHeap side;
            for (const auto& op : seg->ops) run_op(side, op);
            main.meld_from(side);
        } else {
            run_op(main, item.op);
        }
    }
    return out;
}

// --- fuzzing ----------------------------------------------------------------

namespace {

class FuzzGenerator {
public:
    FuzzGenerator(std::uint64_t seed, const FuzzMix& mix, Variant variant)
        : rng_(seed), mix_(mix), variant_(variant) {}

    Trace generate_and_run(std::uint64_t n_ops, const ReplayOptions& opt,
                           ReplayResult& result_out) {
        Trace trace;
        trace.variant = variant_;
        LockstepRunner runner(variant_, opt);

        bool failed = false;
        while (executed_ < n_ops && !failed) {
            OpKind kind = draw_kind(runner);
            TraceOp op;
            switch (kind) {
                case OpKind::Insert:
                    op = make_insert();
                    live_main_.push_back(op.node_index);
                    break;
                case OpKind::DeleteMin:
                    op.kind = OpKind::DeleteMin;
                    if (auto min = runner.main_oracle().find_min()) forget(min->id);
                    break;
                case OpKind::DecreaseKey:
                    op = make_deckey(runner);
                    break;
                case OpKind::Peek:
                    op.kind = OpKind::Peek;
                    break;
                case OpKind::Meld: {
                    TraceSegment seg = make_segment();
                    trace.segments.push_back(seg);
                    Trace::Item block;
                    block.is_segment = true;
                    block.segment_pos = trace.segments.size() - 1;
                    trace.items.push_back(block);
                    op.kind = OpKind::Meld;
                    op.segment_id = seg.id;
                    executed_ += seg.ops.size();
                    break;
                }
            }
            trace.items.push_back({false, op, 0});
            ++executed_;
            failed = !runner.exec_main(op, trace.segments);
            if (!failed && kind == OpKind::Meld) absorb_segment_survivors(runner.main_oracle());
        }
        if (!failed) runner.finish();
        result_out = runner.take_result();
        return trace;
    }

private:
    OpKind draw_kind(const LockstepRunner& runner) {
        std::uint64_t total = mix_.ins + mix_.delmin + mix_.deckey + mix_.meld;
        WCHEAP_CONTRACT(total > 0);
        for (;;) {
            std::uint64_t r = rng_() % total;
            OpKind k;
            if (r < mix_.ins)
                k = OpKind::Insert;
            else if (r < mix_.ins + mix_.delmin)
                k = OpKind::DeleteMin;
            else if (r < mix_.ins + mix_.delmin + mix_.deckey)
                k = OpKind::DecreaseKey;
            else
                k = OpKind::Meld;
            std::size_t n = runner.main_oracle().size();
            if (k == OpKind::Insert && mix_.ins == 0) continue;
            if (k == OpKind::DeleteMin && n == 0) continue;
            if (k == OpKind::DecreaseKey && live_main_.empty()) continue;
            if (k == OpKind::Meld && variant_ != Variant::Full) continue;
            return k;
        }
    }

    TraceOp make_insert() {
        TraceOp op;
        op.kind = OpKind::Insert;
        op.value = static_cast<std::int64_t>(rng_() % (std::uint64_t{1} << 20));
        op.node_index = next_index_++;
        return op;
    }

    TraceOp make_deckey(const LockstepRunner& runner) {
        TraceOp op;
        op.kind = OpKind::DecreaseKey;
        std::size_t pick = rng_() % live_main_.size();
        op.node_index = live_main_[pick];
        std::int64_t cur = runner.main_oracle().value_of(op.node_index);
        op.value = cur - 1 - static_cast<std::int64_t>(rng_() % 1024);
        return op;
    }

    // Segments are small heaps built aside: insert-heavy with a few delmins
    // so they arrive with real rank structure.
    TraceSegment make_segment() {
        TraceSegment seg;
        seg.id = next_segment_id_++;
        std::uint64_t len = 1 + rng_() % 12;
        std::uint64_t seg_live = 0;
        for (std::uint64_t i = 0; i < len; ++i) {
            std::uint64_t r = rng_() % 10;
            TraceOp op;
            if (r < 7 || seg_live == 0) {
                op = make_insert();
                pending_segment_inserts_.push_back(op.node_index);
                ++seg_live;
            } else if (r < 9) {
                op.kind = OpKind::DeleteMin;
                --seg_live;
            } else {
                op.kind = OpKind::Peek;
            }
            seg.ops.push_back(op);
        }
        return seg;
    }

    void absorb_segment_survivors(const OracleHeap& oracle) {
        for (std::uint64_t idx : pending_segment_inserts_)
            if (oracle.contains(idx)) live_main_.push_back(idx);
        pending_segment_inserts_.clear();
    }

    void forget(std::uint64_t id) {
        for (std::size_t i = 0; i < live_main_.size(); ++i) {
            if (live_main_[i] == id) {
                live_main_[i] = live_main_.back();
                live_main_.pop_back();
                return;
            }
        }
    }

    std::mt19937_64 rng_;
    FuzzMix mix_;
    Variant variant_;
    std::uint64_t next_index_ = 0;
    std::uint32_t next_segment_id_ = 1;
    std::vector<std::uint64_t> live_main_;
    std::vector<std::uint64_t> pending_segment_inserts_;
    std::uint64_t executed_ = 0;
};

}  // namespace

FuzzResult differential_fuzz(std::uint64_t seed, std::uint64_t n_ops, const FuzzMix& mix,
                             Variant variant, std::uint64_t check_every,
                             const VariantConfig& base_cfg) {
    WCHEAP_CONTRACT(mix.ins > 0 && mix.delmin > 0);
    WCHEAP_CONTRACT(variant == Variant::Full || mix.meld == 0);
    ReplayOptions opt;
    opt.check_every = check_every;
    opt.base_cfg = base_cfg;

    FuzzResult out;
    FuzzGenerator gen(seed, mix, variant);
    out.trace = gen.generate_and_run(n_ops, opt, out.result);
    out.trace.seed = seed;
    if (out.result.pass) return out;

    // Shrink: reserialize and reparse candidates so node indices renumber
    // consistently; a candidate is kept only if it still fails.
    auto still_fails = [&](const Trace& candidate) -> bool {
        try {
            Trace reparsed = parse_trace_string(serialize_trace(candidate));
            return !replay_trace(reparsed, opt).pass;
        } catch (const Error&) {
            return false;
        }
    };

    // Suffix truncation by bisection: find the shortest failing prefix.
    Trace min = out.trace;
    {
        std::size_t lo = 0, hi = min.items.size();  // prefix of hi items fails
        while (lo + 1 < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            Trace candidate = min;
            candidate.items.resize(mid);
            if (still_fails(candidate))
                hi = mid;
            else
                lo = mid;
        }
        min.items.resize(hi);
    }

    // Greedy single-op deletion from the tail, with a bounded replay budget.
    std::size_t budget = 400;
    for (std::size_t i = min.items.size(); i-- > 0 && budget > 0; --budget) {
        Trace candidate = min;
        candidate.items.erase(candidate.items.begin() + static_cast<std::ptrdiff_t>(i));
        if (still_fails(candidate)) min = candidate;
    }
    out.minimized = min;
    return out;
}

// --- cost measurement --------------------------------------------------------

CostSummary measure_costs(const Trace& trace, std::vector<CostRow>* rows_out,
                          const VariantConfig& base_cfg) {
    std::vector<CostRow> local;
    std::vector<CostRow>& rows = rows_out ? *rows_out : local;
    rows.clear();

    ReplayOptions opt;
    opt.rows = &rows;
    opt.base_cfg = base_cfg;
    ReplayResult res = replay_trace(trace, opt);

    CostSummary sum;
    sum.pass = res.pass;
    sum.message = res.message;
    sum.budget = res.stats.budget;

    std::map<std::uint64_t, std::uint64_t> delmin_bucket_max;  // floor(log2(n+2)) -> comps
    for (const auto& row : rows) {
        auto& mc = sum.max_comparisons[row.op];
        if (row.comparisons > mc) mc = row.comparisons;
        auto& ms = sum.max_steps[row.op];
        if (row.steps > ms) ms = row.steps;
        if (std::string_view(row.op) == "delmin") {
            auto bucket = static_cast<std::uint64_t>(
                std::floor(std::log2(static_cast<double>(row.n + 2))));
            auto& bm = delmin_bucket_max[bucket];
            if (row.comparisons > bm) bm = row.comparisons;
        }
    }

    // Least-squares fit of the per-bucket maxima against log2(n+2), then
    // raise the intercept until the envelope covers every bucket.
    if (delmin_bucket_max.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        double m = static_cast<double>(delmin_bucket_max.size());
        for (auto& [b, y] : delmin_bucket_max) {
            double x = static_cast<double>(b);
            sx += x;
            sy += static_cast<double>(y);
            sxx += x * x;
            sxy += x * static_cast<double>(y);
        }
        double denom = m * sxx - sx * sx;
        sum.c1 = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
        if (sum.c1 < 0) sum.c1 = 0;
        double c2 = -1e300;
        for (auto& [b, y] : delmin_bucket_max)
            c2 = std::max(c2, static_cast<double>(y) - sum.c1 * static_cast<double>(b));
        sum.c2 = c2;
    } else if (!delmin_bucket_max.empty()) {
        sum.c1 = 0;
        sum.c2 = static_cast<double>(delmin_bucket_max.begin()->second);
    }
    return sum;
}

std::string cost_rows_to_csv(const std::vector<CostRow>& rows) {
    std::ostringstream out;
    out << "op_index,op,n,comparisons,steps,wall_ns\n";
    for (const auto& r : rows)
        out << r.op_index << ',' << r.op << ',' << r.n << ',' << r.comparisons << ','
            << r.steps << ',' << r.wall_ns << '\n';
    return out.str();
}

}  // namespace wcheap
