#include "sipauth/sha256.hpp"

#include <bit>
#include <cstring>

#include "sipauth/errors.hpp"

namespace sipauth {

namespace {

constexpr std::array<uint32_t, 64> kRoundConst = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
};

constexpr std::array<uint32_t, 8> kInitState = {
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
};

inline uint32_t rotr(uint32_t x, int n) { return std::rotr(x, n); }

inline uint32_t load_be32(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string Digest256::hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (uint8_t b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

Digest256 Digest256::from_hex(std::string_view hex64) {
    if (hex64.size() != 64) {
        throw ParamError("digest hex string must be 64 characters");
    }
    Digest256 d;
    for (size_t i = 0; i < 32; ++i) {
        const int hi = hex_nibble(hex64[2 * i]);
        const int lo = hex_nibble(hex64[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            throw ParamError("digest hex string has non-hex characters");
        }
        d.bytes[i] = static_cast<uint8_t>((hi << 4) | lo);
    }
    return d;
}

size_t hamming(const Digest256& a, const Digest256& b) {
    size_t d = 0;
    for (size_t i = 0; i < 32; ++i) {
        d += static_cast<size_t>(std::popcount(static_cast<unsigned>(a.bytes[i] ^ b.bytes[i])));
    }
    return d;
}

Sha256::Sha256() : state_(kInitState), buf_{} {}

void Sha256::compress(const uint8_t* block) {
    uint32_t w[64];
    for (int i = 0; i < 16; ++i) {
        w[i] = load_be32(block + 4 * i);
    }
    for (int i = 16; i < 64; ++i) {
        const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }

    uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
    uint32_t e = state_[4], f = state_[5], g = state_[6], h = state_[7];

    for (int i = 0; i < 64; ++i) {
        const uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        const uint32_t ch = (e & f) ^ (~e & g);
        const uint32_t t1 = h + s1 + ch + kRoundConst[i] + w[i];
        const uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        const uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        const uint32_t t2 = s0 + maj;
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }

    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
    state_[4] += e;
    state_[5] += f;
    state_[6] += g;
    state_[7] += h;
}

Sha256& Sha256::update(std::span<const uint8_t> data) {
    total_bytes_ += data.size();
    size_t pos = 0;
    if (buf_len_ > 0) {
        const size_t take = std::min(data.size(), 64 - buf_len_);
        std::memcpy(buf_.data() + buf_len_, data.data(), take);
        buf_len_ += take;
        pos += take;
        if (buf_len_ == 64) {
            compress(buf_.data());
            buf_len_ = 0;
        }
    }
    while (data.size() - pos >= 64) {
        compress(data.data() + pos);
        pos += 64;
    }
    if (pos < data.size()) {
        std::memcpy(buf_.data(), data.data() + pos, data.size() - pos);
        buf_len_ = data.size() - pos;
    }
    return *this;
}

Sha256& Sha256::update(std::string_view text) {
    return update(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

Digest256 Sha256::finalize() {
    const uint64_t bit_len = total_bytes_ * 8;
    uint8_t pad[72] = {0x80};
    // Pad to 56 mod 64, then append the 64-bit big-endian message length.
    const size_t pad_len = (buf_len_ < 56) ? (56 - buf_len_) : (120 - buf_len_);
    uint8_t len_be[8];
    for (int i = 0; i < 8; ++i) {
        len_be[i] = static_cast<uint8_t>(bit_len >> (56 - 8 * i));
    }
    std::memcpy(pad + pad_len, len_be, 8);
    update(std::span<const uint8_t>(pad, pad_len + 8));

    Digest256 out;
    for (int i = 0; i < 8; ++i) {
        out.bytes[4 * i + 0] = static_cast<uint8_t>(state_[i] >> 24);
        out.bytes[4 * i + 1] = static_cast<uint8_t>(state_[i] >> 16);
        out.bytes[4 * i + 2] = static_cast<uint8_t>(state_[i] >> 8);
        out.bytes[4 * i + 3] = static_cast<uint8_t>(state_[i]);
    }
    return out;
}

Digest256 sha256(std::span<const uint8_t> data) {
    return Sha256().update(data).finalize();
}

Digest256 sha256(std::string_view text) {
    return Sha256().update(text).finalize();
}

}  // namespace sipauth
