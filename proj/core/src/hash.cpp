#include "crosstask/hash.hpp"

#include <cstdio>
#include <fstream>

#include "crosstask/errors.hpp"

namespace crosstask {

std::string hex64(uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

uint64_t fnv1a64_fields(std::initializer_list<std::string_view> fields) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& f : fields) {
        char len[11];
        std::snprintf(len, sizeof(len), "%zu:", f.size());
        h = fnv1a64(len, h);
        h = fnv1a64(f, h);
    }
    return h;
}

uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot open file for hashing: " + path);
    uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(std::string_view(buf, static_cast<size_t>(in.gcount())), h);
    }
    return h;
}

}  // namespace crosstask
