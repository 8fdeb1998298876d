#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace decloak {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

inline Bytes to_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(BytesView b) {
    return std::string(b.begin(), b.end());
}

std::string hex(BytesView b);
Bytes from_hex(const std::string& s);

// Little-endian helpers for app-level integer payloads.
inline Bytes encode_i64(int64_t v) {
    Bytes out(8);
    uint64_t u = static_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(u >> (8 * i));
    return out;
}

inline int64_t decode_i64(BytesView b) {
    if (b.size() < 8) throw std::runtime_error("decode_i64: short buffer");
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
    return static_cast<int64_t>(u);
}

}  // namespace decloak
