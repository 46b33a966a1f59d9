#include "sipauth/attest.hpp"

#include "sipauth/errors.hpp"

namespace sipauth {

Digest256 aggregate_digest(std::span<const GarbledSignature> garbled) {
    if (garbled.empty()) {
        throw ParamError("aggregate_digest requires at least one garbled signature");
    }
    Sha256 hasher;
    std::vector<uint8_t> buf;
    for (const auto& g : garbled) {
        buf.clear();
        serialize_bits_into(g.bits, buf);
        hasher.update(buf);
    }
    return hasher.finalize();
}

Verdict evaluate(const Digest256& observed, const Digest256& expected) {
    if (observed == expected) {
        return Verdict::passed();
    }
    size_t first_diff = 0;
    while (first_diff < 32 && observed.bytes[first_diff] == expected.bytes[first_diff]) {
        ++first_diff;
    }
    return Verdict::failed("digest mismatch at byte " + std::to_string(first_diff) +
                           ": observed " + observed.hex() + " expected " + expected.hex());
}

OtpStore::OtpStore(size_t slot_count) : slots_(slot_count) {}

void OtpStore::require_in_range(size_t slot) const {
    if (slot >= slots_.size()) {
        throw ParamError("OTP slot " + std::to_string(slot) + " out of range for " +
                         std::to_string(slots_.size()) + "-slot store");
    }
}

bool OtpStore::written(size_t slot) const {
    require_in_range(slot);
    return slots_[slot].has_value();
}

std::optional<size_t> OtpStore::next_blank() const {
    for (size_t i = 0; i < slots_.size(); ++i) {
        if (!slots_[i].has_value()) {
            return i;
        }
    }
    return std::nullopt;
}

void OtpStore::commit(size_t slot, const Digest256& digest) {
    require_in_range(slot);
    if (slots_[slot].has_value()) {
        throw WriteOnceError("OTP slot " + std::to_string(slot) + " already written");
    }
    slots_[slot] = digest;
}

const Digest256& OtpStore::read(size_t slot) const {
    require_in_range(slot);
    if (!slots_[slot].has_value()) {
        throw UnprovisionedError("OTP slot " + std::to_string(slot) + " is blank");
    }
    return *slots_[slot];
}

Verdict OtpStore::check(size_t slot, const Digest256& digest) const {
    return evaluate(digest, read(slot));
}

}  // namespace sipauth
