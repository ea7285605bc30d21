#pragma once

#include <charconv>
#include <string>

namespace bna::csv {

// Shortest round-trippable decimal form, "." decimal point, "nan"/"inf"
// spelled out. Pure function of the bit pattern, so output files are
// byte-stable across runs and thread counts.
inline std::string format(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string format(int v) { return std::to_string(v); }
inline std::string format(unsigned v) { return std::to_string(v); }
inline std::string format(long v) { return std::to_string(v); }
inline std::string format(unsigned long v) { return std::to_string(v); }
inline std::string format(long long v) { return std::to_string(v); }
inline std::string format(unsigned long long v) { return std::to_string(v); }

}  // namespace bna::csv
