#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"

#include "oracle.hpp"
#include "sipauth/errors.hpp"
#include "sipauth/integrator.hpp"
#include "sipauth/rng.hpp"

using namespace sipauth;

namespace {

struct TestRig {
    SipAssembly sip;
    std::mt19937_64 rng;
    Nonce enroll_nonce;
    std::vector<uint8_t> challenge;

    Nonce fresh_nonce() { return random_nonce(rng); }
};

TestRig make_rig(uint32_t n_chiplets, uint64_t seed, SipOptions options = {}) {
    std::mt19937_64 rng(derive_seed(seed, 0x7269ULL));
    std::vector<ChipletIdentity> ids;
    for (uint32_t i = 0; i < n_chiplets; ++i) {
        ChipletIdentity id;
        id.vendor_id = static_cast<uint32_t>(rng());
        id.chiplet_index = i;
        id.secret = random_secret(rng);
        ids.push_back(id);
    }
    Nonce enroll_nonce = random_nonce(rng);
    auto challenge = random_bytes(rng, 16);
    return TestRig{SipAssembly(std::move(ids), options), std::move(rng), enroll_nonce,
                   std::move(challenge)};
}

AdversaryHook response_hook(HookMode mode, uint32_t chiplet) {
    AdversaryHook hook;
    hook.mode = std::move(mode);
    hook.placement = HookPlacement::MaliciousChiplet;
    hook.chiplet_index = static_cast<int32_t>(chiplet);
    hook.only_kind = MsgKind::Response;
    return hook;
}

void check_report_invariants(const BootReport& report) {
    const bool all_pass =
        std::all_of(report.per_chiplet.begin(), report.per_chiplet.end(),
                    [](const PerChipletResult& r) { return r.verdict.pass; });
    CHECK(report.aggregate.pass == all_pass);
    for (uint32_t index : report.disabled) {
        const auto it = std::find_if(report.per_chiplet.begin(), report.per_chiplet.end(),
                                     [&](const PerChipletResult& r) { return r.index == index; });
        REQUIRE(it != report.per_chiplet.end());
        CHECK_FALSE(it->verdict.pass);
    }
    for (size_t i = 1; i < report.per_chiplet.size(); ++i) {
        CHECK(report.per_chiplet[i - 1].index < report.per_chiplet[i].index);
    }
}

}  // namespace

TEST_CASE("enrollment produces one distinct baseline per chiplet") {
    TestRig rig = make_rig(4, 61);
    const SecurityParams params{4, 8};
    const auto& baselines = rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    REQUIRE(baselines.size() == 4);
    std::set<std::string> digests;
    for (const auto& rec : baselines) {
        digests.insert(rec.digest.hex());
        CHECK(rec.nonce == rig.enroll_nonce);
    }
    CHECK(digests.size() == 4);
}

TEST_CASE("re-enrollment is rejected") {
    TestRig rig = make_rig(2, 62);
    const SecurityParams params{4, 8};
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    CHECK_THROWS_AS(rig.sip.enroll(params, rig.fresh_nonce(), rig.challenge),
                    AlreadyEnrolledError);
}

TEST_CASE("enrollment digest equals the straight-line oracle") {
    TestRig rig = make_rig(1, 63);
    const SecurityParams params{4, 8};
    const auto& baselines = rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    const auto& id = rig.sip.chiplet(0).identity();
    const Digest256 expected =
        oracle::expected_digest(id.vendor_id, id.chiplet_index, id.secret.seed,
                                rig.enroll_nonce.value, params.kappa, params.width,
                                rig.challenge);
    CHECK(baselines[0].digest == expected);
}

TEST_CASE("boot requires enrollment; reauthentication requires a boot") {
    TestRig rig = make_rig(1, 64);
    const SecurityParams params{4, 8};
    CHECK_THROWS_AS(rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge),
                    NotEnrolledError);
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    CHECK_THROWS_AS(rig.sip.reauthenticate(params, rig.fresh_nonce(), rig.challenge),
                    ProtocolOrderError);
}

TEST_CASE("clean secure boot passes all chiplets and commits the aggregate") {
    TestRig rig = make_rig(4, 65);
    const SecurityParams params{4, 8};
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    const BootReport report = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);

    check_report_invariants(report);
    CHECK(report.aggregate.pass);
    CHECK(report.disabled.empty());
    CHECK(report.otp_action.kind == OtpAction::Kind::Committed);
    CHECK(report.otp_action.slot == 0);
    REQUIRE(report.aggregate_digest.has_value());
    CHECK(rig.sip.otp().read(0) == *report.aggregate_digest);

    // Aggregate equals the oracle recomposition over all four chiplets.
    std::vector<std::vector<uint8_t>> serialized;
    for (uint32_t i = 0; i < 4; ++i) {
        const auto& id = rig.sip.chiplet(i).identity();
        const auto sig = oracle::signature_bits(id.vendor_id, id.chiplet_index, id.secret.seed,
                                                rig.challenge, params.width);
        serialized.push_back(
            oracle::serialize(oracle::garbled_bits(id.secret.seed, report.nonce.value,
                                                   params.kappa, sig)));
    }
    CHECK(*report.aggregate_digest == oracle::aggregate(serialized));
}

TEST_CASE("per-chiplet digests match the oracle end to end") {
    TestRig rig = make_rig(3, 66);
    const SecurityParams params{4, 8};
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    const Nonce boot_nonce = rig.fresh_nonce();
    for (uint32_t i = 0; i < 3; ++i) {
        const auto& id = rig.sip.chiplet(i).identity();
        CHECK(rig.sip.expected_digest(i, boot_nonce, rig.challenge, params) ==
              oracle::expected_digest(id.vendor_id, id.chiplet_index, id.secret.seed,
                                      boot_nonce.value, params.kappa, params.width,
                                      rig.challenge));
    }
}

TEST_CASE("a tampered response fails only the affected chiplet and disables it") {
    TestRig rig = make_rig(4, 67);
    const SecurityParams params{4, 8};
    rig.sip.fabric().add_hook(response_hook(hook::TamperBits{{32}}, 2));
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    const BootReport report = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);

    check_report_invariants(report);
    CHECK_FALSE(report.aggregate.pass);
    CHECK(report.disabled == std::set<uint32_t>{2});
    for (const auto& r : report.per_chiplet) {
        CHECK(r.verdict.pass == (r.index != 2));
    }
    CHECK(rig.sip.chiplet(2).phase() == ChipletPhase::Disabled);
}

TEST_CASE("second boot with a fresh nonce checks the committed aggregate") {
    TestRig rig = make_rig(4, 68);
    const SecurityParams params{4, 8};
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    const BootReport first = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
    REQUIRE(first.aggregate.pass);

    const BootReport second = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
    check_report_invariants(second);
    CHECK(second.aggregate.pass);
    CHECK(second.otp_action.kind == OtpAction::Kind::Checked);
    CHECK(second.otp_action.slot == 0);
    REQUIRE(second.otp_action.verdict.has_value());
    CHECK(second.otp_action.verdict->pass);
}

TEST_CASE("nonce reuse is rejected before any message is sent") {
    TestRig rig = make_rig(2, 69);
    const SecurityParams params{4, 8};
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);

    SUBCASE("reusing the enrollment nonce") {
        const size_t transcript_before = rig.sip.fabric().transcript().size();
        CHECK_THROWS_AS(rig.sip.secure_boot(params, rig.enroll_nonce, rig.challenge),
                        FreshnessError);
        CHECK(rig.sip.fabric().transcript().size() == transcript_before);
    }
    SUBCASE("reusing a boot nonce") {
        const Nonce nonce = rig.fresh_nonce();
        rig.sip.secure_boot(params, nonce, rig.challenge);
        const size_t transcript_before = rig.sip.fabric().transcript().size();
        CHECK_THROWS_AS(rig.sip.reauthenticate(params, nonce, rig.challenge), FreshnessError);
        CHECK(rig.sip.fabric().transcript().size() == transcript_before);
    }
}

TEST_CASE("otp capacity is enforced before the first commit") {
    SipOptions options;
    options.otp_slots = 1;
    TestRig rig = make_rig(1, 70, options);
    const SecurityParams params{4, 8};
    rig.sip.otp().commit(0, sha256(std::string("occupied")));
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    CHECK_THROWS_AS(rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge),
                    CapacityError);
}

TEST_CASE("reauthentication skips disabled chiplets and never re-enables") {
    TestRig rig = make_rig(4, 71);
    const SecurityParams params{4, 8};
    rig.sip.fabric().add_hook(response_hook(hook::TamperBits{{33}}, 1));
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    const BootReport first = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
    REQUIRE(first.disabled == std::set<uint32_t>{1});

    rig.sip.fabric().clear_hooks();
    const BootReport again = rig.sip.reauthenticate(params, rig.fresh_nonce(), rig.challenge);
    check_report_invariants(again);
    CHECK(again.disabled == std::set<uint32_t>{1});
    for (const auto& r : again.per_chiplet) {
        if (r.index == 1) {
            CHECK(r.skipped_disabled);
            CHECK_FALSE(r.verdict.pass);
        } else {
            CHECK(r.verdict.pass);
        }
    }
}

TEST_CASE("a replayed old response fails under a new nonce") {
    TestRig rig = make_rig(2, 72);
    const SecurityParams params{4, 8};
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    const BootReport first = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
    REQUIRE(first.aggregate.pass);

    // Substitute chiplet 0's fresh response with its first-boot response.
    rig.sip.fabric().add_hook(response_hook(hook::Replay{1}, 0));
    const BootReport again = rig.sip.reauthenticate(params, rig.fresh_nonce(), rig.challenge);
    check_report_invariants(again);
    CHECK_FALSE(again.per_chiplet[0].verdict.pass);
    CHECK(again.per_chiplet[1].verdict.pass);
    CHECK(again.disabled == std::set<uint32_t>{0});
}

TEST_CASE("an all-disabled assembly reports every chiplet disabled") {
    TestRig rig = make_rig(3, 73);
    const SecurityParams params{4, 8};
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
    for (uint32_t i = 0; i < 3; ++i) {
        rig.sip.chiplet(i).disable();
    }
    const BootReport report = rig.sip.reauthenticate(params, rig.fresh_nonce(), rig.challenge);
    check_report_invariants(report);
    CHECK_FALSE(report.aggregate.pass);
    CHECK(report.disabled == std::set<uint32_t>{0, 1, 2});
    CHECK(report.otp_action.kind == OtpAction::Kind::None);
    for (const auto& r : report.per_chiplet) {
        CHECK(r.skipped_disabled);
    }
}

// Soundness at small scale: every single-bit corruption of the response
// payload must flip the verdict, with no sampling.
TEST_CASE("exhaustive single-bit corruptions are all detected at 8x4") {
    const SecurityParams params{4, 8};
    for (uint32_t pos = 0; pos < 32; ++pos) {
        TestRig rig = make_rig(1, 7400 + pos);
        rig.sip.fabric().add_hook(response_hook(hook::TamperBits{{32 + pos}}, 0));
        rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
        const BootReport report = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
        check_report_invariants(report);
        CHECK_FALSE(report.per_chiplet[0].verdict.pass);
        CHECK(report.disabled == std::set<uint32_t>{0});
    }
}

TEST_CASE("completeness: passive observation never flips a verdict") {
    for (uint64_t seed = 0; seed < 100; ++seed) {
        TestRig rig = make_rig(2, 7500 + seed);
        AdversaryHook passive;
        passive.mode = hook::Passive{};
        rig.sip.fabric().add_hook(passive);
        const SecurityParams params{4, 8};
        rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
        const BootReport report = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
        check_report_invariants(report);
        CHECK(report.aggregate.pass);
    }
}

// Blame isolation across hook modes: a hook scoped to chiplet 1 never
// changes the verdict of any other chiplet.
TEST_CASE("hooks scoped to one chiplet never flip another's verdict") {
    std::vector<HookMode> modes;
    modes.emplace_back(hook::TamperBits{{32, 40}});
    modes.emplace_back(hook::Drop{{EndpointId::integrator()}});
    modes.emplace_back(hook::Forge{std::vector<uint8_t>{0, 0, 0, 8, 0xa5}});
    modes.emplace_back(hook::Mitm{{0xff}});

    for (size_t m = 0; m < modes.size(); ++m) {
        TestRig rig = make_rig(4, 7600 + m);
        const SecurityParams params{4, 8};
        rig.sip.fabric().add_hook(response_hook(modes[m], 1));
        rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
        const BootReport report = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
        check_report_invariants(report);
        for (const auto& r : report.per_chiplet) {
            if (r.index == 1) {
                CHECK_FALSE(r.verdict.pass);
            } else {
                CHECK(r.verdict.pass);
            }
        }
    }
}

TEST_CASE("a tampered challenge leg also fails verification") {
    TestRig rig = make_rig(2, 77);
    const SecurityParams params{4, 8};
    AdversaryHook hook;
    hook.mode = hook::TamperBits{{0}};  // flips a nonce bit in transit
    hook.placement = HookPlacement::MaliciousChiplet;
    hook.chiplet_index = 1;
    hook.only_kind = MsgKind::Challenge;
    rig.sip.fabric().add_hook(hook);
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    const BootReport report = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
    check_report_invariants(report);
    CHECK(report.per_chiplet[0].verdict.pass);
    CHECK_FALSE(report.per_chiplet[1].verdict.pass);
}

TEST_CASE("boot reports serialize with stable key order") {
    TestRig rig = make_rig(2, 78);
    const SecurityParams params{4, 8};
    rig.sip.enroll(params, rig.enroll_nonce, rig.challenge);
    const BootReport report = rig.sip.secure_boot(params, rig.fresh_nonce(), rig.challenge);
    const std::string a = report.to_json();
    const std::string b = report.to_json();
    CHECK(a == b);
    CHECK(a.find("\"nonce\"") < a.find("\"per_chiplet\""));
    CHECK(a.find("\"per_chiplet\"") < a.find("\"aggregate\""));
    CHECK(a.find("\"otp_action\"") < a.find("\"disabled\""));
}

TEST_CASE("chiplet indices must be contiguous from zero") {
    std::mt19937_64 rng(79);
    std::vector<ChipletIdentity> ids(2);
    ids[0].chiplet_index = 0;
    ids[1].chiplet_index = 2;
    CHECK_THROWS_AS(SipAssembly(std::move(ids)), ParamError);
}
