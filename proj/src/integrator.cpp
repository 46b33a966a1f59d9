#include "sipauth/integrator.hpp"

#include <algorithm>

#include "json.hpp"

#include "sipauth/errors.hpp"

namespace sipauth {

namespace {

constexpr size_t kNonceBytes = 16;

std::vector<uint8_t> challenge_payload(const Nonce& nonce, std::span<const uint8_t> challenge) {
    std::vector<uint8_t> payload;
    payload.reserve(kNonceBytes + challenge.size());
    payload.insert(payload.end(), nonce.value.begin(), nonce.value.end());
    payload.insert(payload.end(), challenge.begin(), challenge.end());
    return payload;
}

}  // namespace

std::string BootReport::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["nonce"] = nonce.hex();
    j["per_chiplet"] = nlohmann::ordered_json::array();
    for (const auto& r : per_chiplet) {
        nlohmann::ordered_json row;
        row["index"] = r.index;
        row["pass"] = r.verdict.pass;
        row["detail"] = r.verdict.detail;
        row["latency_cycles"] = r.latency;
        row["skipped_disabled"] = r.skipped_disabled;
        j["per_chiplet"].push_back(std::move(row));
    }
    j["aggregate"] = {{"pass", aggregate.pass}, {"detail", aggregate.detail}};
    if (aggregate_digest.has_value()) {
        j["aggregate_digest"] = aggregate_digest->hex();
    } else {
        j["aggregate_digest"] = nullptr;
    }
    nlohmann::ordered_json otp;
    switch (otp_action.kind) {
        case OtpAction::Kind::None:
            otp["action"] = "none";
            break;
        case OtpAction::Kind::Committed:
            otp["action"] = "committed";
            otp["slot"] = otp_action.slot;
            break;
        case OtpAction::Kind::Checked:
            otp["action"] = "checked";
            otp["slot"] = otp_action.slot;
            otp["pass"] = otp_action.verdict.has_value() && otp_action.verdict->pass;
            otp["detail"] = otp_action.verdict.has_value() ? otp_action.verdict->detail : "";
            break;
    }
    j["otp_action"] = std::move(otp);
    j["disabled"] = disabled;
    j["latency_uncalibrated"] = latency_uncalibrated;
    return j.dump(indent) + "\n";
}

SipAssembly::SipAssembly(std::vector<ChipletIdentity> identities, SipOptions options)
    : otp_(options.otp_slots), options_(options) {
    if (identities.empty()) {
        throw ParamError("assembly requires at least one chiplet");
    }
    for (size_t i = 0; i < identities.size(); ++i) {
        if (identities[i].chiplet_index != i) {
            throw ParamError("chiplet indices must be 0..N-1 with no gaps");
        }
    }
    wbr_defaulted_ = options_.wbr_bits == 0;
    const size_t wbr = wbr_defaulted_ ? 64 : options_.wbr_bits;
    chiplets_.reserve(identities.size());
    for (auto& id : identities) {
        chiplets_.emplace_back(id, wbr);
    }
    fabric_.register_endpoint(EndpointId::integrator());
    for (size_t i = 0; i < chiplets_.size(); ++i) {
        fabric_.register_endpoint(EndpointId::chiplet(static_cast<uint32_t>(i)));
    }
    fabric_.set_hop_delay(options_.fabric_hop_delay);
}

Digest256 SipAssembly::expected_digest(size_t index, const Nonce& nonce,
                                       std::span<const uint8_t> challenge,
                                       const SecurityParams& params) const {
    const GarbledSignature expected =
        expected_garbled(chiplets_.at(index).identity(), nonce, params, challenge);
    return sha256(expected.serialize());
}

const std::vector<BaselineRecord>& SipAssembly::enroll(const SecurityParams& params,
                                                       const Nonce& enrollment_nonce,
                                                       std::span<const uint8_t> challenge) {
    if (enrolled_) {
        throw AlreadyEnrolledError("assembly already enrolled");
    }
    params.validate();
    if (used_nonces_.count(enrollment_nonce) != 0) {
        throw FreshnessError("enrollment nonce already used");
    }

    // The default WBR sizing depends on the challenge, which is first
    // known here; chiplets are still Idle, so rebuilding them is safe.
    const size_t needed = std::max<size_t>(challenge.size() * 8, 64);
    if (wbr_defaulted_ && needed > 64) {
        std::vector<ChipletIdentity> ids;
        ids.reserve(chiplets_.size());
        for (const auto& c : chiplets_) {
            ids.push_back(c.identity());
        }
        chiplets_.clear();
        for (auto& id : ids) {
            chiplets_.emplace_back(id, needed);
        }
    }

    used_nonces_.insert(enrollment_nonce);
    for (size_t i = 0; i < chiplets_.size(); ++i) {
        BaselineRecord rec;
        rec.vendor_id = chiplets_[i].identity().vendor_id;
        rec.chiplet_index = static_cast<uint32_t>(i);
        rec.digest = expected_digest(i, enrollment_nonce, challenge, params);
        rec.nonce = enrollment_nonce;
        baselines_.push_back(rec);
    }
    enrolled_ = true;
    return baselines_;
}

BootReport SipAssembly::secure_boot(const SecurityParams& params, const Nonce& boot_nonce,
                                    std::span<const uint8_t> challenge) {
    return run_boot(params, boot_nonce, challenge, /*is_reauth=*/false);
}

BootReport SipAssembly::reauthenticate(const SecurityParams& params, const Nonce& nonce,
                                       std::span<const uint8_t> challenge) {
    return run_boot(params, nonce, challenge, /*is_reauth=*/true);
}

BootReport SipAssembly::run_boot(const SecurityParams& params, const Nonce& nonce,
                                 std::span<const uint8_t> challenge, bool is_reauth) {
    if (!enrolled_) {
        throw NotEnrolledError("secure boot requires prior enrollment");
    }
    if (is_reauth && boot_count_ == 0) {
        throw ProtocolOrderError("reauthenticate requires at least one prior secure_boot");
    }
    params.validate();
    // Freshness and capacity are rejected before any message is sent.
    if (used_nonces_.count(nonce) != 0) {
        throw FreshnessError("boot nonce already used in this assembly's history");
    }
    if (!commit_record_.has_value() && !otp_.next_blank().has_value()) {
        throw CapacityError("OTP store exhausted: no blank slot for the first commit");
    }
    used_nonces_.insert(nonce);

    BootReport report;
    report.nonce = nonce;
    report.latency_uncalibrated =
        options_.permissive_latency && !latency_calibrated(params.kappa);

    const EndpointId integrator = EndpointId::integrator();
    std::vector<std::pair<uint32_t, std::vector<uint8_t>>> passing;

    for (size_t i = 0; i < chiplets_.size(); ++i) {
        Chiplet& c = chiplets_[i];
        const auto index = static_cast<uint32_t>(i);

        if (c.phase() == ChipletPhase::Disabled) {
            report.per_chiplet.push_back(
                {index, Verdict::failed("chiplet disabled; skipped"), 0, true});
            continue;
        }

        const auto fail_and_disable = [&](std::string why, uint32_t latency) {
            c.disable();
            report.per_chiplet.push_back({index, Verdict::failed(std::move(why)), latency, false});
        };

        // Challenge leg.
        Message cmsg = fabric_.make_message(integrator, EndpointId::chiplet(index),
                                            MsgKind::Challenge,
                                            challenge_payload(nonce, challenge));
        SendOutcome cout = fabric_.send(cmsg);
        if (!cout.delivered()) {
            fail_and_disable("challenge dropped in fabric", 0);
            continue;
        }

        // Chiplet side: respond to whatever actually arrived.
        const auto& delivered = cout.message.payload;
        if (delivered.size() < kNonceBytes) {
            fail_and_disable("malformed challenge delivery", 0);
            continue;
        }
        Nonce rx_nonce;
        std::copy_n(delivered.begin(), kNonceBytes, rx_nonce.value.begin());
        const std::span<const uint8_t> rx_challenge(delivered.data() + kNonceBytes,
                                                    delivered.size() - kNonceBytes);
        c.load_wir(WirInstruction::AuthInit);
        const AuthResponse resp =
            c.respond_auth(rx_nonce, params, rx_challenge, options_.permissive_latency);
        fabric_.advance(resp.latency);

        // Response leg.
        Message rmsg = fabric_.make_message(EndpointId::chiplet(index), integrator,
                                            MsgKind::Response, resp.garbled.serialize());
        SendOutcome rout = fabric_.send(rmsg);
        if (!rout.delivered()) {
            fail_and_disable("response dropped in fabric", resp.latency);
            continue;
        }

        // Integrator side: digest of the received bytes against the
        // recomputed expectation for this (nonce, challenge).
        const std::vector<uint8_t>& payload = rout.message.payload;
        const Digest256 observed = sha256(payload);
        const Digest256 expected = expected_digest(i, nonce, challenge, params);
        Verdict verdict = evaluate(observed, expected);
        if (verdict.pass) {
            c.mark_verified();
            report.per_chiplet.push_back({index, Verdict::passed(), resp.latency, false});
            passing.emplace_back(index, payload);
        } else {
            try {
                (void)deserialize_bits_exact(payload);
            } catch (const DimensionError& e) {
                verdict.detail = std::string("malformed response framing: ") + e.what();
            }
            fail_and_disable(verdict.detail, resp.latency);
        }
    }

    const bool all_pass = std::all_of(report.per_chiplet.begin(), report.per_chiplet.end(),
                                      [](const PerChipletResult& r) { return r.verdict.pass; });
    size_t fail_count = report.per_chiplet.size();
    for (const auto& r : report.per_chiplet) {
        fail_count -= r.verdict.pass ? 1 : 0;
    }
    report.aggregate = all_pass ? Verdict::passed()
                                : Verdict::failed(std::to_string(fail_count) + " of " +
                                                  std::to_string(report.per_chiplet.size()) +
                                                  " chiplets failed verification");

    // Aggregate digest over passing responses, ascending index (the loop
    // order already is; kept explicit for permutation independence).
    std::sort(passing.begin(), passing.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (!passing.empty()) {
        Sha256 hasher;
        for (const auto& [idx, payload] : passing) {
            hasher.update(payload);
        }
        report.aggregate_digest = hasher.finalize();

        if (!commit_record_.has_value()) {
            const size_t slot = *otp_.next_blank();
            otp_.commit(slot, *report.aggregate_digest);
            CommitRecord rec;
            rec.slot = slot;
            rec.nonce = nonce;
            rec.challenge.assign(challenge.begin(), challenge.end());
            rec.params = params;
            for (const auto& [idx, payload] : passing) {
                rec.indices.push_back(idx);
            }
            commit_record_ = std::move(rec);
            report.otp_action = {OtpAction::Kind::Committed, slot, std::nullopt};
        } else {
            // Recompute the expected aggregate under the committed nonce
            // for the currently passing set; a changed set or corrupted
            // store surfaces as a check failure.
            std::vector<GarbledSignature> expected_set;
            expected_set.reserve(passing.size());
            for (const auto& [idx, payload] : passing) {
                expected_set.push_back(expected_garbled(chiplets_[idx].identity(),
                                                        commit_record_->nonce,
                                                        commit_record_->params,
                                                        commit_record_->challenge));
            }
            const Digest256 expected_aggregate = aggregate_digest(expected_set);
            Verdict check = otp_.check(commit_record_->slot, expected_aggregate);
            report.otp_action = {OtpAction::Kind::Checked, commit_record_->slot,
                                 std::move(check)};
        }
    } else {
        report.otp_action = {OtpAction::Kind::None, 0, std::nullopt};
    }

    for (size_t i = 0; i < chiplets_.size(); ++i) {
        if (chiplets_[i].phase() == ChipletPhase::Disabled) {
            report.disabled.insert(static_cast<uint32_t>(i));
        }
    }

    ++boot_count_;
    return report;
}

}  // namespace sipauth
