#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sipauth {

/// Ordered bit string. Bit 0 is the first bit of the stream; the packed
/// byte form stores bit 0 in the most significant bit of byte 0 and
/// zero-fills any trailing pad bits of the last byte.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(size_t nbits) : bits_(nbits, 0) {}

    /// Parse a string of '0'/'1' characters, first character = bit 0.
    static BitVec from_string(std::string_view zeros_and_ones);
    static BitVec from_packed(std::span<const uint8_t> bytes, size_t nbits);

    size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }

    uint8_t operator[](size_t i) const { return bits_[i]; }
    void set(size_t i, uint8_t v) { bits_[i] = v & 1u; }
    void flip(size_t i) { bits_[i] ^= 1u; }
    void push_back(uint8_t v) { bits_.push_back(v & 1u); }
    void append(const BitVec& other);
    BitVec slice(size_t pos, size_t len) const;

    /// Number of differing positions; throws DimensionError on size mismatch.
    size_t hamming(const BitVec& other) const;

    std::string to_string() const;
    std::vector<uint8_t> packed() const;

    bool operator==(const BitVec&) const = default;

private:
    std::vector<uint8_t> bits_;  // one element per bit, each 0 or 1
};

// Length-prefixed bit-string wire format used wherever bit strings cross
// module boundaries or enter digests: a 32-bit big-endian bit count
// followed by the packed bytes (MSB-first within each byte).
std::vector<uint8_t> serialize_bits(const BitVec& bits);
void serialize_bits_into(const BitVec& bits, std::vector<uint8_t>& out);

/// Read one bit string starting at `offset`; advances `offset` past it.
/// Throws DimensionError on truncated input or nonzero pad bits.
BitVec deserialize_bits(std::span<const uint8_t> buf, size_t& offset);

/// Read exactly one bit string occupying the whole buffer.
BitVec deserialize_bits_exact(std::span<const uint8_t> buf);

}  // namespace sipauth
