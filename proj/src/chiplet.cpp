#include "sipauth/chiplet.hpp"

#include <string>

#include "sipauth/errors.hpp"

namespace sipauth {

namespace {

void append_be32(std::vector<uint8_t>& buf, uint32_t v) {
    buf.push_back(static_cast<uint8_t>(v >> 24));
    buf.push_back(static_cast<uint8_t>(v >> 16));
    buf.push_back(static_cast<uint8_t>(v >> 8));
    buf.push_back(static_cast<uint8_t>(v));
}

}  // namespace

Signature generate_signature(const ChipletIdentity& id, std::span<const uint8_t> challenge,
                             uint32_t width) {
    if (width < 1) {
        throw ParamError("signature width must be >= 1");
    }
    if (width > 256) {
        throw ParamError("signature width exceeds the digest truncation limit of 256");
    }
    std::vector<uint8_t> buf;
    buf.reserve(8 + id.secret.seed.size() + challenge.size());
    append_be32(buf, id.vendor_id);
    append_be32(buf, id.chiplet_index);
    buf.insert(buf.end(), id.secret.seed.begin(), id.secret.seed.end());
    buf.insert(buf.end(), challenge.begin(), challenge.end());
    const Digest256 d = sha256(buf);

    Signature sig;
    for (uint32_t i = 0; i < width; ++i) {
        sig.bits.push_back(d.bit(i));
    }
    return sig;
}

bool latency_calibrated(uint32_t kappa) {
    return kappa == 16 || kappa == 32 || kappa == 64;
}

uint32_t latency_cycles(uint32_t kappa, bool permissive) {
    switch (kappa) {
        case 16:
            return 96;
        case 32:
            return 160;
        case 64:
            return 192;
        default:
            break;
    }
    if (permissive) {
        return 0;  // uncalibrated sentinel
    }
    throw CalibrationError("no latency calibration for kappa=" + std::to_string(kappa));
}

const char* wir_name(WirInstruction instr) {
    switch (instr) {
        case WirInstruction::Bypass:
            return "Bypass";
        case WirInstruction::AuthInit:
            return "AuthInit";
        case WirInstruction::AuthShift:
            return "AuthShift";
        case WirInstruction::Disable:
            return "Disable";
    }
    return "?";
}

const char* phase_name(ChipletPhase phase) {
    switch (phase) {
        case ChipletPhase::Idle:
            return "Idle";
        case ChipletPhase::Challenged:
            return "Challenged";
        case ChipletPhase::Responded:
            return "Responded";
        case ChipletPhase::Verified:
            return "Verified";
        case ChipletPhase::Disabled:
            return "Disabled";
    }
    return "?";
}

DftWrapper::DftWrapper(size_t wbr_bits) : wbr_(wbr_bits) {
    if (wbr_bits == 0) {
        throw ParamError("WBR length must be >= 1 bit");
    }
}

void DftWrapper::load(WirInstruction instr) {
    wir_ = instr;
    if (instr == WirInstruction::AuthInit) {
        wbr_ = BitVec(wbr_.size());
    }
}

BitVec DftWrapper::shift(const BitVec& bits_in) {
    if (wir_ != WirInstruction::AuthShift) {
        throw ProtocolOrderError(std::string("WBR shift requires wir=AuthShift, have ") +
                                 wir_name(wir_));
    }
    BitVec out;
    const size_t len = wbr_.size();
    for (size_t i = 0; i < bits_in.size(); ++i) {
        out.push_back(wbr_[0]);
        for (size_t j = 0; j + 1 < len; ++j) {
            wbr_.set(j, wbr_[j + 1]);
        }
        wbr_.set(len - 1, bits_in[i]);
    }
    return out;
}

void DftWrapper::preload(const BitVec& pattern) {
    if (pattern.size() != wbr_.size()) {
        throw DimensionError("WBR preload pattern length must equal register length");
    }
    wbr_ = pattern;
}

Chiplet::Chiplet(ChipletIdentity id, size_t wbr_bits) : id_(id), wrapper_(wbr_bits) {}

void Chiplet::require_enabled(const char* op) const {
    if (phase_ == ChipletPhase::Disabled) {
        throw DisabledError(std::string(op) + " on disabled chiplet " +
                            std::to_string(id_.chiplet_index));
    }
}

void Chiplet::load_wir(WirInstruction instr) {
    require_enabled("load_wir");
    if (instr == WirInstruction::Disable) {
        disable();
        return;
    }
    wrapper_.load(instr);
}

BitVec Chiplet::shift_wbr(const BitVec& bits_in) {
    require_enabled("shift_wbr");
    return wrapper_.shift(bits_in);
}

void Chiplet::preload_wbr(const BitVec& pattern) {
    require_enabled("preload_wbr");
    wrapper_.preload(pattern);
}

AuthResponse Chiplet::respond_auth(const Nonce& nonce, const SecurityParams& params,
                                   std::span<const uint8_t> challenge,
                                   bool permissive_latency) {
    require_enabled("respond_auth");
    if (phase_ != ChipletPhase::Idle && phase_ != ChipletPhase::Verified &&
        phase_ != ChipletPhase::Challenged) {
        throw ProtocolOrderError(std::string("respond_auth requires Idle, Verified, or "
                                             "Challenged phase, have ") +
                                 phase_name(phase_));
    }
    phase_ = ChipletPhase::Challenged;  // challenge receipt

    params.validate();
    AuthResponse resp;
    resp.chiplet_index = id_.chiplet_index;
    resp.garbled = expected_garbled(id_, nonce, params, challenge);
    resp.latency = latency_cycles(params.kappa, permissive_latency);

    phase_ = ChipletPhase::Responded;
    return resp;
}

void Chiplet::mark_verified() {
    require_enabled("mark_verified");
    if (phase_ != ChipletPhase::Responded) {
        throw ProtocolOrderError(std::string("mark_verified requires Responded phase, have ") +
                                 phase_name(phase_));
    }
    phase_ = ChipletPhase::Verified;
}

void Chiplet::disable() {
    phase_ = ChipletPhase::Disabled;
    wrapper_.load(WirInstruction::Disable);
}

GarbledSignature expected_garbled(const ChipletIdentity& id, const Nonce& nonce,
                                  const SecurityParams& params,
                                  std::span<const uint8_t> challenge) {
    const Signature sig = generate_signature(id, challenge, params.width);
    const EncodingTable table = derive_encoding(id.secret, nonce, params);
    return garble_signature(sig, table);
}

}  // namespace sipauth
