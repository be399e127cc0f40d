#ifndef WCHEAP_TRACE_HPP
#define WCHEAP_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wcheap/types.hpp"

namespace wcheap {

// Line-oriented trace file, format "wcheap-trace v1".
//
//   wcheap-trace v1 seed=<u64> variant=<full|simple>
//   segment <id>          # heap built aside and consumed by "meld <id>"
//   ins <value>
//   end
//   ins <value>
//   deckey <node-index> <value>
//   delmin
//   peek
//   meld <id>
//
// Node indices number the "ins" lines of the whole file in order, starting
// at 0, and double as the tiebreak ids, so replays are deterministic.
// Segment ops run when the corresponding meld executes. Parsing then
// serializing reproduces the file byte for byte.

enum class OpKind { Insert, DeleteMin, DecreaseKey, Meld, Peek };

struct TraceOp {
    OpKind kind = OpKind::Insert;
    std::int64_t value = 0;        // Insert / DecreaseKey
    std::uint64_t node_index = 0;  // DecreaseKey target, Insert's own index
    std::uint32_t segment_id = 0;  // Meld
};

struct TraceSegment {
    std::uint32_t id = 0;
    std::vector<TraceOp> ops;
};

struct Trace {
    std::uint64_t seed = 0;
    Variant variant = Variant::Full;

    // File items in order: an op of the main sequence or a segment block.
    struct Item {
        bool is_segment = false;
        TraceOp op;
        std::size_t segment_pos = 0;  // index into `segments`
    };
    std::vector<Item> items;
    std::vector<TraceSegment> segments;

    const TraceSegment* segment_by_id(std::uint32_t id) const {
        for (const auto& s : segments)
            if (s.id == id) return &s;
        return nullptr;
    }
    std::uint64_t insert_count() const;
};

Trace parse_trace(std::istream& in);
Trace parse_trace_string(const std::string& text);
Trace load_trace(const std::string& path);

std::string serialize_trace(const Trace& t);
void save_trace(const Trace& t, const std::string& path);

}  // namespace wcheap

#endif  // WCHEAP_TRACE_HPP
