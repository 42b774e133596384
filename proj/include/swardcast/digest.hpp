#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace swardcast {

/// FNV-1a 64-bit hash.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string to_hex(std::uint64_t value);

/// Stable digest of a canonical (sorted-key) JSON dump.
inline std::string text_digest(std::string_view text) {
    return to_hex(fnv1a64(text));
}

}  // namespace swardcast
