#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace sipauth {

/// 256-bit digest value.
struct Digest256 {
    std::array<uint8_t, 32> bytes{};

    bool operator==(const Digest256&) const = default;

    /// Lowercase hexadecimal, 64 characters.
    std::string hex() const;
    static Digest256 from_hex(std::string_view hex64);

    /// Bit i with MSB-first ordering within each byte (bit 0 = MSB of byte 0).
    uint8_t bit(size_t i) const { return (bytes[i >> 3] >> (7 - (i & 7))) & 1u; }
};

/// Number of differing bits between two digests.
size_t hamming(const Digest256& a, const Digest256& b);

/// Streaming SHA-256 (FIPS 180-4).
class Sha256 {
public:
    Sha256();

    Sha256& update(std::span<const uint8_t> data);
    Sha256& update(std::string_view text);

    /// Finishes the hash. The object must not be reused afterwards.
    Digest256 finalize();

private:
    void compress(const uint8_t* block);

    std::array<uint32_t, 8> state_;
    std::array<uint8_t, 64> buf_;
    size_t buf_len_ = 0;
    uint64_t total_bytes_ = 0;
};

Digest256 sha256(std::span<const uint8_t> data);
Digest256 sha256(std::string_view text);

}  // namespace sipauth
