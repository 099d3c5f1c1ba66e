#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace crosstask {

/// FNV-1a 64-bit. Non-cryptographic; used for score-cache keys and
/// manifest content fingerprints.
inline uint64_t fnv1a64(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ULL) {
    uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t value);

/// Hashes a sequence of fields unambiguously (length-prefixed), so that
/// ("ab","c") and ("a","bc") produce different keys.
uint64_t fnv1a64_fields(std::initializer_list<std::string_view> fields);

/// Content hash of a file, or throws Error(kIo).
uint64_t hash_file(const std::string& path);

}  // namespace crosstask
