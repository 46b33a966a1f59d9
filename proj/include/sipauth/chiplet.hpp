#pragma once

#include <cstdint>
#include <span>

#include "sipauth/garble.hpp"

namespace sipauth {

struct ChipletIdentity {
    uint32_t vendor_id = 0;
    uint32_t chiplet_index = 0;  ///< unique position within the SiP
    DeviceSecret secret;
};

/// Keyed watermark stand-in: the first `width` bits of
/// SHA-256(be32(vendor_id) || be32(chiplet_index) || secret || challenge).
/// Deterministic, so the vendor can recompute it for verification.
Signature generate_signature(const ChipletIdentity& id, std::span<const uint8_t> challenge,
                             uint32_t width);

/// Authentication latency in clock cycles, from calibration data for
/// kappa in {16, 32, 64}. Other kappas throw CalibrationError unless
/// `permissive` is set, in which case they return a 0-cycle sentinel and
/// reports mark the value uncalibrated. Never interpolated.
uint32_t latency_cycles(uint32_t kappa, bool permissive = false);
bool latency_calibrated(uint32_t kappa);

enum class WirInstruction : uint8_t { Bypass, AuthInit, AuthShift, Disable };

const char* wir_name(WirInstruction instr);

/// Test-wrapper register pair: instruction register plus a fixed-length
/// boundary shift register for challenge/response bits.
class DftWrapper {
public:
    explicit DftWrapper(size_t wbr_bits);

    WirInstruction wir() const { return wir_; }
    const BitVec& wbr() const { return wbr_; }

    /// AuthInit clears the boundary register; other instructions leave it.
    void load(WirInstruction instr);

    /// Serial shift: each input bit enters the register head while the
    /// tail bit shifts out. Requires wir = AuthShift.
    BitVec shift(const BitVec& bits_in);

    /// Direct register load, for bring-up and tests; pattern length must
    /// equal the register length.
    void preload(const BitVec& pattern);

private:
    WirInstruction wir_ = WirInstruction::Bypass;
    BitVec wbr_;
};

enum class ChipletPhase : uint8_t { Idle, Challenged, Responded, Verified, Disabled };

const char* phase_name(ChipletPhase phase);

struct AuthResponse {
    uint32_t chiplet_index = 0;
    GarbledSignature garbled;
    uint32_t latency = 0;  ///< clock cycles, latency_cycles(kappa)
};

/// One chiplet in the assembly: identity, test wrapper, and the
/// secure-boot participant state machine. Disabled is absorbing: once
/// disabled, every operation except disable() itself fails.
class Chiplet {
public:
    explicit Chiplet(ChipletIdentity id, size_t wbr_bits = 64);

    const ChipletIdentity& identity() const { return id_; }
    ChipletPhase phase() const { return phase_; }
    const DftWrapper& wrapper() const { return wrapper_; }

    void load_wir(WirInstruction instr);
    BitVec shift_wbr(const BitVec& bits_in);
    void preload_wbr(const BitVec& pattern);

    /// Garbles the chiplet's signature for this session:
    /// garble_signature(generate_signature(id, challenge, width),
    /// derive_encoding(secret, nonce, params)). Allowed from Idle,
    /// Verified, or Challenged; leaves the chiplet Responded.
    AuthResponse respond_auth(const Nonce& nonce, const SecurityParams& params,
                              std::span<const uint8_t> challenge,
                              bool permissive_latency = false);

    /// Responded -> Verified.
    void mark_verified();

    /// Permanently disables the chiplet. Idempotent.
    void disable();

private:
    void require_enabled(const char* op) const;

    ChipletIdentity id_;
    DftWrapper wrapper_;
    ChipletPhase phase_ = ChipletPhase::Idle;
};

/// Vendor-side recomputation of the garbled response a genuine chiplet
/// would produce. Shared by enrollment and per-boot expected digests.
GarbledSignature expected_garbled(const ChipletIdentity& id, const Nonce& nonce,
                                  const SecurityParams& params,
                                  std::span<const uint8_t> challenge);

}  // namespace sipauth
