#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sipauth/bitvec.hpp"
#include "sipauth/sha256.hpp"

namespace sipauth {

/// Garbling parameters: each signature bit expands to one kappa-bit word
/// (1 mask bit followed by kappa-1 label bits), so a width-bit signature
/// garbles to width*kappa bits total.
struct SecurityParams {
    uint32_t kappa = 0;  ///< bits per garbled word, mask bit included
    uint32_t width = 0;  ///< signature bit width

    /// Throws ParamError unless kappa >= 2 and width >= 1.
    void validate() const;

    uint64_t garbled_len() const { return static_cast<uint64_t>(width) * kappa; }
};

/// Per-chiplet secret provisioned at enrollment; immutable afterwards.
/// All label/mask material derives from it, so the vendor side can
/// recompute expected encodings for any nonce.
struct DeviceSecret {
    std::array<uint8_t, 32> seed{};

    bool operator==(const DeviceSecret&) const = default;
};

/// Per-boot-session freshness value issued by the integrator.
struct Nonce {
    std::array<uint8_t, 16> value{};

    auto operator<=>(const Nonce&) const = default;
    std::string hex() const;
};

/// Watermark value as an ordered bit sequence; bit 0 is the
/// least-significant position of the watermark word.
struct Signature {
    BitVec bits;

    size_t width() const { return bits.size(); }
    bool operator==(const Signature&) const = default;
};

/// Encoding of one signature bit position: a mask bit per value plus a
/// (kappa-1)-bit label per value. The mask for value 1 is always the
/// complement of the mask for value 0, which keeps the two garbled words
/// distinct regardless of label collisions.
struct WireEncoding {
    uint8_t mask_zero = 0;
    BitVec label_zero;
    BitVec label_one;

    uint8_t mask_one() const { return mask_zero ^ 1u; }

    /// mask||label for the given bit value; length is exactly kappa.
    BitVec word_for(uint8_t bit) const;

    bool operator==(const WireEncoding&) const = default;
};

/// One WireEncoding per signature bit position, wire i = signature bit i.
struct EncodingTable {
    uint32_t kappa = 0;
    std::vector<WireEncoding> wires;

    size_t width() const { return wires.size(); }
    bool operator==(const EncodingTable&) const = default;
};

/// Obfuscated signature: width kappa-bit words flattened in ascending
/// wire order, total bit length width*kappa.
struct GarbledSignature {
    uint32_t kappa = 0;
    BitVec bits;

    size_t width() const { return kappa == 0 ? 0 : bits.size() / kappa; }
    BitVec word(size_t wire) const { return bits.slice(wire * kappa, kappa); }

    std::vector<uint8_t> serialize() const { return serialize_bits(bits); }

    bool operator==(const GarbledSignature&) const = default;
};

/// Deterministic per-wire encoding derivation. For wire i and value v,
/// the label is the first kappa-1 bits of
/// SHA-256(seed || nonce || be32(i) || u8(v)) and the mask for value 0 is
/// the next bit of the v=0 digest; the mask for value 1 is its complement
/// by construction, never derived independently. Identical inputs always
/// produce identical tables.
EncodingTable derive_encoding(const DeviceSecret& secret, const Nonce& nonce,
                              const SecurityParams& params);

/// mask||label word for one signature bit. Total over valid inputs.
BitVec garble_bit(uint8_t bit, const WireEncoding& wire);

/// Garble every signature bit against its wire; flattened length is
/// width*kappa. Throws DimensionError if the widths disagree.
GarbledSignature garble_signature(const Signature& sig, const EncodingTable& table);

/// Vendor-side inverse of garble_bit. Returns the bit whose word matches;
/// throws TamperDecodeError when the word matches neither. A corruption
/// that lands exactly on the other valid word decodes as that bit; the
/// digest layer is responsible for catching such substitutions.
uint8_t decode_word(const BitVec& word, const WireEncoding& wire);

/// Brute-force work factor for replaying a garbled signature:
/// (width*kappa) * 2^192, exact.
boost::multiprecision::cpp_int replay_complexity(const SecurityParams& params);

}  // namespace sipauth
