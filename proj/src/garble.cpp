#include "sipauth/garble.hpp"

#include <string>

#include "sipauth/errors.hpp"

namespace sipauth {

namespace {

// Label derivation truncates a single digest, which bounds how many bits
// one wire can consume: kappa-1 label bits plus one mask bit.
constexpr uint32_t kMaxDerivableKappa = 256;

void append_be32(std::vector<uint8_t>& buf, uint32_t v) {
    buf.push_back(static_cast<uint8_t>(v >> 24));
    buf.push_back(static_cast<uint8_t>(v >> 16));
    buf.push_back(static_cast<uint8_t>(v >> 8));
    buf.push_back(static_cast<uint8_t>(v));
}

Digest256 wire_digest(const DeviceSecret& secret, const Nonce& nonce, uint32_t wire,
                      uint8_t value) {
    std::vector<uint8_t> buf;
    buf.reserve(secret.seed.size() + nonce.value.size() + 5);
    buf.insert(buf.end(), secret.seed.begin(), secret.seed.end());
    buf.insert(buf.end(), nonce.value.begin(), nonce.value.end());
    append_be32(buf, wire);
    buf.push_back(value);
    return sha256(buf);
}

BitVec leading_bits(const Digest256& d, uint32_t nbits) {
    BitVec out;
    for (uint32_t i = 0; i < nbits; ++i) {
        out.push_back(d.bit(i));
    }
    return out;
}

}  // namespace

void SecurityParams::validate() const {
    if (kappa < 2) {
        throw ParamError("kappa must be >= 2: one mask bit plus at least one label bit");
    }
    if (width < 1) {
        throw ParamError("width must be >= 1");
    }
}

std::string Nonce::hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(32);
    for (uint8_t b : value) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

BitVec WireEncoding::word_for(uint8_t bit) const {
    BitVec word;
    word.push_back((bit & 1u) ? mask_one() : mask_zero);
    word.append((bit & 1u) ? label_one : label_zero);
    return word;
}

EncodingTable derive_encoding(const DeviceSecret& secret, const Nonce& nonce,
                              const SecurityParams& params) {
    params.validate();
    if (params.kappa > kMaxDerivableKappa) {
        throw ParamError("kappa exceeds the single-digest derivation limit of " +
                         std::to_string(kMaxDerivableKappa));
    }
    const uint32_t label_bits = params.kappa - 1;
    EncodingTable table;
    table.kappa = params.kappa;
    table.wires.reserve(params.width);
    for (uint32_t i = 0; i < params.width; ++i) {
        const Digest256 d0 = wire_digest(secret, nonce, i, 0);
        const Digest256 d1 = wire_digest(secret, nonce, i, 1);
        WireEncoding wire;
        wire.label_zero = leading_bits(d0, label_bits);
        wire.label_one = leading_bits(d1, label_bits);
        wire.mask_zero = d0.bit(label_bits);
        table.wires.push_back(std::move(wire));
    }
    return table;
}

BitVec garble_bit(uint8_t bit, const WireEncoding& wire) {
    return wire.word_for(bit);
}

GarbledSignature garble_signature(const Signature& sig, const EncodingTable& table) {
    if (sig.bits.size() != table.wires.size()) {
        throw DimensionError("signature width " + std::to_string(sig.bits.size()) +
                             " does not match encoding table width " +
                             std::to_string(table.wires.size()));
    }
    GarbledSignature out;
    out.kappa = table.kappa;
    for (size_t i = 0; i < table.wires.size(); ++i) {
        out.bits.append(garble_bit(sig.bits[i], table.wires[i]));
    }
    return out;
}

uint8_t decode_word(const BitVec& word, const WireEncoding& wire) {
    if (word == wire.word_for(0)) {
        return 0;
    }
    if (word == wire.word_for(1)) {
        return 1;
    }
    throw TamperDecodeError("garbled word matches neither encoding of its wire");
}

boost::multiprecision::cpp_int replay_complexity(const SecurityParams& params) {
    params.validate();
    return boost::multiprecision::cpp_int(params.garbled_len()) << 192;
}

}  // namespace sipauth
