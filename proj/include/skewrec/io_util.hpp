#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <functional>
#include <iosfwd>
#include <string>

namespace skewrec {

// Writes through a temporary file in the same directory and renames it into
// place, so a failed command never leaves a partial output behind.
void atomic_write_file(const std::string& path,
                       const std::function<void(std::ostream&)>& writer);

namespace detail {

inline void store_le64(std::uint64_t v, unsigned char out[8]) {
    for (int k = 0; k < 8; ++k) out[k] = static_cast<unsigned char>(v >> (8 * k));
}

inline std::uint64_t load_le64(const unsigned char in[8]) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(in[k]) << (8 * k);
    return v;
}

inline void store_le_double(double d, unsigned char out[8]) {
    store_le64(std::bit_cast<std::uint64_t>(d), out);
}

inline double load_le_double(const unsigned char in[8]) {
    return std::bit_cast<double>(load_le64(in));
}

}  // namespace detail
}  // namespace skewrec
