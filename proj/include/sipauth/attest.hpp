#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sipauth/garble.hpp"
#include "sipauth/sha256.hpp"

namespace sipauth {

/// Result of a digest comparison. Pass iff the compared digests were
/// byte-identical; detail carries the mismatch description otherwise.
struct Verdict {
    bool pass = false;
    std::string detail;

    static Verdict passed() { return {true, {}}; }
    static Verdict failed(std::string why) { return {false, std::move(why)}; }
};

/// SHA-256 over the concatenation of the serialized garbled signatures in
/// the order given (callers pass ascending chiplet index). The
/// length-prefixed serialization keeps operand boundaries unambiguous for
/// any mix of widths. Throws ParamError on an empty list.
Digest256 aggregate_digest(std::span<const GarbledSignature> garbled);

/// Byte-exact digest comparison.
Verdict evaluate(const Digest256& observed, const Digest256& expected);

/// Write-once digest slots. A written slot's content never changes for
/// the lifetime of the store; writing it again always fails.
class OtpStore {
public:
    explicit OtpStore(size_t slot_count = 8);

    size_t size() const { return slots_.size(); }
    bool written(size_t slot) const;
    std::optional<size_t> next_blank() const;

    /// Throws WriteOnceError if the slot was written, ParamError if out of range.
    void commit(size_t slot, const Digest256& digest);

    /// Throws UnprovisionedError on a blank slot.
    const Digest256& read(size_t slot) const;

    /// Pass iff the stored content equals `digest`. Throws
    /// UnprovisionedError on a blank slot.
    Verdict check(size_t slot, const Digest256& digest) const;

private:
    void require_in_range(size_t slot) const;

    std::vector<std::optional<Digest256>> slots_;
};

/// Vendor-provided reference digest for one chiplet under one nonce.
struct BaselineRecord {
    uint32_t vendor_id = 0;
    uint32_t chiplet_index = 0;
    Digest256 digest;
    Nonce nonce;
};

}  // namespace sipauth
