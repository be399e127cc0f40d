#include "wcheap/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace wcheap {

namespace {

[[noreturn]] void trace_error(std::size_t line_no, const std::string& msg) {
    throw Error(Error::Code::Trace, "trace parse error at line " + std::to_string(line_no) +
                                        ": " + msg);
}

bool consume_prefix(std::string_view& s, std::string_view prefix) {
    if (s.substr(0, prefix.size()) != prefix) return false;
    s.remove_prefix(prefix.size());
    return true;
}

template <class Int>
Int parse_int(std::string_view& s, std::size_t line_no) {
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{}) trace_error(line_no, "expected a number");
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
    return v;
}

void expect_end(std::string_view s, std::size_t line_no) {
    if (!s.empty()) trace_error(line_no, "trailing characters");
}

TraceOp parse_op_line(std::string_view s, std::size_t line_no, std::uint64_t& ins_counter,
                      bool allow_meld) {
    TraceOp op;
    if (consume_prefix(s, "ins ")) {
        op.kind = OpKind::Insert;
        op.value = parse_int<std::int64_t>(s, line_no);
        op.node_index = ins_counter++;
    } else if (s == "delmin") {
        op.kind = OpKind::DeleteMin;
        s = {};
    } else if (consume_prefix(s, "deckey ")) {
        op.kind = OpKind::DecreaseKey;
        op.node_index = parse_int<std::uint64_t>(s, line_no);
        if (!consume_prefix(s, " ")) trace_error(line_no, "expected value after node index");
        op.value = parse_int<std::int64_t>(s, line_no);
    } else if (consume_prefix(s, "meld ")) {
        if (!allow_meld) trace_error(line_no, "meld inside a segment");
        op.kind = OpKind::Meld;
        op.segment_id = parse_int<std::uint32_t>(s, line_no);
    } else if (s == "peek") {
        op.kind = OpKind::Peek;
        s = {};
    } else {
        trace_error(line_no, "unknown op");
    }
    expect_end(s, line_no);
    return op;
}

}  // namespace

std::uint64_t Trace::insert_count() const {
    std::uint64_t n = 0;
    for (const auto& it : items)
        if (!it.is_segment && it.op.kind == OpKind::Insert) ++n;
    for (const auto& s : segments)
        for (const auto& op : s.ops)
            if (op.kind == OpKind::Insert) ++n;
    return n;
}

Trace parse_trace(std::istream& in) {
    Trace t;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) trace_error(1, "empty input");
    ++line_no;
    {
        std::string_view s = line;
        if (!consume_prefix(s, "wcheap-trace v1 seed=")) trace_error(line_no, "bad header");
        t.seed = parse_int<std::uint64_t>(s, line_no);
        if (!consume_prefix(s, " variant=")) trace_error(line_no, "bad header");
        if (s == "full")
            t.variant = Variant::Full;
        else if (s == "simple")
            t.variant = Variant::Simplified;
        else
            trace_error(line_no, "unknown variant");
    }

    std::uint64_t ins_counter = 0;
    bool in_segment = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = line;
        if (s.empty()) trace_error(line_no, "blank line");
        if (consume_prefix(s, "segment ")) {
            if (in_segment) trace_error(line_no, "nested segment");
            TraceSegment seg;
            seg.id = parse_int<std::uint32_t>(s, line_no);
            expect_end(s, line_no);
            if (t.segment_by_id(seg.id)) trace_error(line_no, "duplicate segment id");
            t.segments.push_back(seg);
            Trace::Item item;
            item.is_segment = true;
            item.segment_pos = t.segments.size() - 1;
            t.items.push_back(item);
            in_segment = true;
        } else if (s == "end") {
            if (!in_segment) trace_error(line_no, "end outside a segment");
            in_segment = false;
        } else if (in_segment) {
            t.segments.back().ops.push_back(
                parse_op_line(s, line_no, ins_counter, /*allow_meld=*/false));
        } else {
            Trace::Item item;
            item.op = parse_op_line(s, line_no, ins_counter, /*allow_meld=*/true);
            if (item.op.kind == OpKind::Meld && !t.segment_by_id(item.op.segment_id))
                trace_error(line_no, "meld of an undefined segment");
            if (item.op.kind == OpKind::Meld && t.variant == Variant::Simplified)
                trace_error(line_no, "meld in a simplified-variant trace");
            t.items.push_back(item);
        }
    }
    if (in_segment) trace_error(line_no + 1, "unterminated segment");
    return t;
}

Trace parse_trace_string(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Error::Code::Trace, "cannot open trace file: " + path);
    return parse_trace(in);
}

namespace {

void serialize_op(std::ostringstream& out, const TraceOp& op) {
    switch (op.kind) {
        case OpKind::Insert:
            out << "ins " << op.value << '\n';
            break;
        case OpKind::DeleteMin:
            out << "delmin\n";
            break;
        case OpKind::DecreaseKey:
            out << "deckey " << op.node_index << ' ' << op.value << '\n';
            break;
        case OpKind::Meld:
            out << "meld " << op.segment_id << '\n';
            break;
        case OpKind::Peek:
            out << "peek\n";
            break;
    }
}

}  // namespace

std::string serialize_trace(const Trace& t) {
    std::ostringstream out;
    out << "wcheap-trace v1 seed=" << t.seed << " variant="
        << (t.variant == Variant::Full ? "full" : "simple") << '\n';
    for (const auto& item : t.items) {
        if (item.is_segment) {
            const TraceSegment& seg = t.segments[item.segment_pos];
            out << "segment " << seg.id << '\n';
            for (const auto& op : seg.ops) serialize_op(out, op);
            out << "end\n";
        } else {
            serialize_op(out, item.op);
        }
    }
    return out.str();
}

void save_trace(const Trace& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Error::Code::Trace, "cannot write trace file: " + path);
    out << serialize_trace(t);
}

}  // namespace wcheap
