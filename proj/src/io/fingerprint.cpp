#include "jointloss/io/fingerprint.hpp"

#include <cstdint>
#include <cstdio>

namespace jointloss::io {

std::string fingerprint(const nlohmann::json& value) {
    const std::string text = value.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace jointloss::io
