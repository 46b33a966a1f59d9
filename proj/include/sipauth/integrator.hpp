#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sipauth/attest.hpp"
#include "sipauth/chiplet.hpp"
#include "sipauth/fabric.hpp"

namespace sipauth {

struct PerChipletResult {
    uint32_t index = 0;
    Verdict verdict;
    uint32_t latency = 0;          ///< response latency in clock cycles, 0 if none computed
    bool skipped_disabled = false; ///< chiplet was already disabled and never challenged
};

struct OtpAction {
    enum class Kind : uint8_t { None, Committed, Checked };

    Kind kind = Kind::None;
    size_t slot = 0;
    std::optional<Verdict> verdict;  ///< set for Checked
};

struct BootReport {
    Nonce nonce;
    std::vector<PerChipletResult> per_chiplet;  ///< ascending chiplet index
    Verdict aggregate;                          ///< Pass iff every per-chiplet verdict passed
    std::optional<Digest256> aggregate_digest;  ///< over passing responses, if any
    OtpAction otp_action;
    std::set<uint32_t> disabled;                ///< all chiplets disabled after this boot
    bool latency_uncalibrated = false;

    /// JSON object with stable key order; reruns are byte-identical.
    std::string to_json(int indent = 2) const;
};

struct SipOptions {
    size_t otp_slots = 8;
    uint32_t fabric_hop_delay = 0;
    /// Accept kappas outside the calibrated latency table; responses then
    /// carry a 0-cycle sentinel and the report is marked uncalibrated.
    bool permissive_latency = true;
    /// 0 derives max(challenge bits, 64) at enrollment.
    size_t wbr_bits = 0;
};

/// The assembled SiP from the trusted integrator's point of view:
/// chiplets on an interposer fabric, the OTP store, vendor baselines, and
/// the secure-boot orchestration over them. Enrollment escrows each
/// chiplet's device secret with the integrator's evaluator, which is what
/// lets it recompute expected digests under any boot nonce while the
/// fabric and other chiplets only ever observe garbled values and digests.
class SipAssembly {
public:
    explicit SipAssembly(std::vector<ChipletIdentity> identities, SipOptions options = {});

    size_t chiplet_count() const { return chiplets_.size(); }
    Chiplet& chiplet(size_t index) { return chiplets_.at(index); }
    const Chiplet& chiplet(size_t index) const { return chiplets_.at(index); }
    Fabric& fabric() { return fabric_; }
    const Fabric& fabric() const { return fabric_; }
    OtpStore& otp() { return otp_; }
    const OtpStore& otp() const { return otp_; }

    bool enrolled() const { return enrolled_; }
    size_t boot_count() const { return boot_count_; }
    const std::vector<BaselineRecord>& baselines() const { return baselines_; }

    /// Computes one vendor baseline digest per chiplet under the
    /// enrollment nonce. Throws AlreadyEnrolledError on re-enrollment.
    const std::vector<BaselineRecord>& enroll(const SecurityParams& params,
                                              const Nonce& enrollment_nonce,
                                              std::span<const uint8_t> challenge);

    /// Full boot pass: challenges every enabled chiplet over the fabric,
    /// verifies each response against a recomputed expected digest,
    /// disables failures immediately, aggregates passing responses, and
    /// commits the first aggregate to OTP (later boots check against it).
    /// The boot nonce must never have been used in this assembly's
    /// history; reuse is rejected before any message is sent.
    BootReport secure_boot(const SecurityParams& params, const Nonce& boot_nonce,
                           std::span<const uint8_t> challenge);

    /// Same pipeline in check mode; requires at least one prior
    /// secure_boot. Disabled chiplets are skipped, never re-enabled.
    BootReport reauthenticate(const SecurityParams& params, const Nonce& nonce,
                              std::span<const uint8_t> challenge);

    /// Expected per-chiplet digest from escrowed vendor data.
    Digest256 expected_digest(size_t index, const Nonce& nonce,
                              std::span<const uint8_t> challenge,
                              const SecurityParams& params) const;

private:
    BootReport run_boot(const SecurityParams& params, const Nonce& nonce,
                        std::span<const uint8_t> challenge, bool is_reauth);

    struct CommitRecord {
        size_t slot = 0;
        Nonce nonce;
        std::vector<uint8_t> challenge;
        SecurityParams params;
        std::vector<uint32_t> indices;
    };

    std::vector<Chiplet> chiplets_;
    Fabric fabric_;
    OtpStore otp_;
    SipOptions options_;
    std::vector<BaselineRecord> baselines_;
    std::set<Nonce> used_nonces_;
    std::optional<CommitRecord> commit_record_;
    bool enrolled_ = false;
    bool wbr_defaulted_ = false;
    size_t boot_count_ = 0;
};

}  // namespace sipauth
