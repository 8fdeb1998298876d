#pragma once

// Canonical serialization: every hashed or signed structure is encoded as
// length-prefixed field concatenation in declared field order. This file is
// the single source of truth for that encoding; digests computed over these
// bytes are stable across runs and platforms.

#include "decloak/bytes.hpp"

#include <optional>

namespace decloak {

class Writer {
public:
    void u8(uint8_t v) { buf_.push_back(v); }

    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void bytes(BytesView b) {
        u32(static_cast<uint32_t>(b.size()));
        buf_.insert(buf_.end(), b.begin(), b.end());
    }

    void str(const std::string& s) { bytes(Bytes(s.begin(), s.end())); }

    template <size_t N>
    void fixed(const std::array<uint8_t, N>& a) {
        buf_.insert(buf_.end(), a.begin(), a.end());
    }

    void opt_bytes(const std::optional<Bytes>& b) {
        u8(b ? 1 : 0);
        if (b) bytes(*b);
    }

    const Bytes& out() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class Reader {
public:
    explicit Reader(BytesView b) : buf_(b) {}

    uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    Bytes bytes() {
        uint32_t n = u32();
        need(n);
        Bytes out(buf_.begin() + pos_, buf_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    std::string str() {
        Bytes b = bytes();
        return std::string(b.begin(), b.end());
    }

    template <size_t N>
    std::array<uint8_t, N> fixed() {
        need(N);
        std::array<uint8_t, N> a{};
        std::memcpy(a.data(), buf_.data() + pos_, N);
        pos_ += N;
        return a;
    }

    std::optional<Bytes> opt_bytes() {
        if (u8() == 0) return std::nullopt;
        return bytes();
    }

    bool done() const { return pos_ == buf_.size(); }

private:
    void need(size_t n) const {
        if (pos_ + n > buf_.size()) throw std::runtime_error("Reader: truncated input");
    }

    BytesView buf_;
    size_t pos_ = 0;
};

}  // namespace decloak
