#include "sipauth/bitvec.hpp"

#include "sipauth/errors.hpp"

namespace sipauth {

BitVec BitVec::from_string(std::string_view zeros_and_ones) {
    BitVec out;
    out.bits_.reserve(zeros_and_ones.size());
    for (char c : zeros_and_ones) {
        if (c != '0' && c != '1') {
            throw ParamError("bit string literal may contain only '0' and '1'");
        }
        out.bits_.push_back(static_cast<uint8_t>(c - '0'));
    }
    return out;
}

BitVec BitVec::from_packed(std::span<const uint8_t> bytes, size_t nbits) {
    if (bytes.size() < (nbits + 7) / 8) {
        throw DimensionError("packed buffer too short for requested bit count");
    }
    BitVec out;
    out.bits_.reserve(nbits);
    for (size_t i = 0; i < nbits; ++i) {
        out.bits_.push_back((bytes[i >> 3] >> (7 - (i & 7))) & 1u);
    }
    return out;
}

void BitVec::append(const BitVec& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

BitVec BitVec::slice(size_t pos, size_t len) const {
    if (pos + len > bits_.size()) {
        throw DimensionError("bit slice out of range");
    }
    BitVec out;
    out.bits_.assign(bits_.begin() + static_cast<ptrdiff_t>(pos),
                     bits_.begin() + static_cast<ptrdiff_t>(pos + len));
    return out;
}

size_t BitVec::hamming(const BitVec& other) const {
    if (size() != other.size()) {
        throw DimensionError("hamming distance requires equal lengths");
    }
    size_t d = 0;
    for (size_t i = 0; i < bits_.size(); ++i) {
        d += bits_[i] ^ other.bits_[i];
    }
    return d;
}

std::string BitVec::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (uint8_t b : bits_) {
        s.push_back(static_cast<char>('0' + b));
    }
    return s;
}

std::vector<uint8_t> BitVec::packed() const {
    std::vector<uint8_t> out((bits_.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) {
            out[i >> 3] |= static_cast<uint8_t>(1u << (7 - (i & 7)));
        }
    }
    return out;
}

std::vector<uint8_t> serialize_bits(const BitVec& bits) {
    std::vector<uint8_t> out;
    serialize_bits_into(bits, out);
    return out;
}

void serialize_bits_into(const BitVec& bits, std::vector<uint8_t>& out) {
    const auto n = static_cast<uint32_t>(bits.size());
    out.push_back(static_cast<uint8_t>(n >> 24));
    out.push_back(static_cast<uint8_t>(n >> 16));
    out.push_back(static_cast<uint8_t>(n >> 8));
    out.push_back(static_cast<uint8_t>(n));
    auto packed = bits.packed();
    out.insert(out.end(), packed.begin(), packed.end());
}

BitVec deserialize_bits(std::span<const uint8_t> buf, size_t& offset) {
    if (buf.size() < offset + 4) {
        throw DimensionError("bit string truncated: missing length prefix");
    }
    const uint32_t n = (static_cast<uint32_t>(buf[offset]) << 24) |
                       (static_cast<uint32_t>(buf[offset + 1]) << 16) |
                       (static_cast<uint32_t>(buf[offset + 2]) << 8) |
                       static_cast<uint32_t>(buf[offset + 3]);
    const size_t nbytes = (static_cast<size_t>(n) + 7) / 8;
    if (buf.size() - offset - 4 < nbytes) {
        throw DimensionError("bit string truncated: payload shorter than its length prefix");
    }
    auto body = buf.subspan(offset + 4, nbytes);
    // Pad bits beyond n must be zero; anything else is framing corruption.
    if (n % 8 != 0 && nbytes > 0) {
        const uint8_t pad_mask = static_cast<uint8_t>(0xffu >> (n % 8));
        if ((body[nbytes - 1] & pad_mask) != 0) {
            throw DimensionError("bit string has nonzero pad bits");
        }
    }
    offset += 4 + nbytes;
    return BitVec::from_packed(body, n);
}

BitVec deserialize_bits_exact(std::span<const uint8_t> buf) {
    size_t offset = 0;
    BitVec out = deserialize_bits(buf, offset);
    if (offset != buf.size()) {
        throw DimensionError("trailing bytes after bit string");
    }
    return out;
}

}  // namespace sipauth
