#ifndef WCHEAP_KEY_ENCODING_HPP
#define WCHEAP_KEY_ENCODING_HPP

#include <bit>
#include <cmath>
#include <cstdint>

#include "wcheap/types.hpp"

namespace wcheap {

// Ordered-float mode: the heap core works on 64-bit integer key values; for
// double-valued workloads these maps give an order-preserving, round-trippable
// encoding (sign-flip trick). NaNs are rejected; -0.0 sorts just below +0.0.
inline std::int64_t encode_double_key(double x) {
    if (std::isnan(x)) throw Error(Error::Code::Contract, "NaN is not a valid key");
    constexpr std::uint64_t top = std::uint64_t{1} << 63;
    std::uint64_t u = std::bit_cast<std::uint64_t>(x);
    std::uint64_t ordered = (u & top) ? ~u : (u | top);  // unsigned-ordered
    return std::bit_cast<std::int64_t>(ordered ^ top);   // recenter to signed
}

inline double decode_double_key(std::int64_t code) {
    constexpr std::uint64_t top = std::uint64_t{1} << 63;
    std::uint64_t ordered = std::bit_cast<std::uint64_t>(code) ^ top;
    std::uint64_t u = (ordered & top) ? (ordered ^ top) : ~ordered;
    return std::bit_cast<double>(u);
}

}  // namespace wcheap

#endif  // WCHEAP_KEY_ENCODING_HPP
