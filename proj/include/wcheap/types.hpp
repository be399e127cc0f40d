#ifndef WCHEAP_TYPES_HPP
#define WCHEAP_TYPES_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace wcheap {

// Heap keys are (value, id) pairs ordered lexicographically. Ids are unique,
// so the order is total even when values collide.
struct Key {
    std::int64_t value = 0;
    std::uint64_t id = 0;

    friend bool operator==(const Key& a, const Key& b) {
        return a.value == b.value && a.id == b.id;
    }
};

struct CostCounters {
    std::uint64_t comparisons = 0;
    std::uint64_t structural_steps = 0;
};

// The one instrumented comparator. Every key ordering decision in the heap,
// the oracle-independent baselines and the benchmarks goes through here.
inline bool key_less(const Key& a, const Key& b, CostCounters& c) {
    ++c.comparisons;
    if (a.value != b.value) return a.value < b.value;
    return a.id < b.id;
}

// Uninstrumented order, for reference models and assertions only.
inline bool key_less_raw(const Key& a, const Key& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.id < b.id;
}

enum class Variant { Full, Simplified };

// R-hat(n): bound on the maximum rank of an n-node heap. Violation list
// sizes and the loss sum are bounded by R-hat(n) + 1.
double default_rank_bound(std::uint64_t n);

struct VariantConfig {
    Variant variant = Variant::Full;
    double (*rank_bound_fn)(std::uint64_t) = &default_rank_bound;
    // Test-only fault injection: drop the rank decrement in remove_child so
    // the differential fuzzer has a known bug to find.
    bool inject_skip_rank_decrement = false;
};

class Error : public std::runtime_error {
public:
    enum class Code {
        InvalidHeap,
        EmptyHeap,
        KeyIncrease,
        InvalidHandle,
        Unsupported,
        Contract,
        Trace,
    };

    Error(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

namespace detail {
[[noreturn]] inline void contract_failure(const char* expr, const char* file, int line) {
    throw Error(Error::Code::Contract,
                std::string("contract violation: ") + expr + " at " + file + ":" +
                    std::to_string(line));
}
}  // namespace detail

#define WCHEAP_CONTRACT(cond)                                                  \
    do {                                                                       \
        if (!(cond)) ::wcheap::detail::contract_failure(#cond, __FILE__, __LINE__); \
    } while (0)

}  // namespace wcheap

#endif  // WCHEAP_TYPES_HPP
