#include <random>
#include <sstream>

#include "doctest.h"

#include "sipauth/errors.hpp"
#include "sipauth/fabric.hpp"
#include "sipauth/rng.hpp"

using namespace sipauth;

namespace {

Fabric small_fabric(size_t chiplets = 4) {
    Fabric fabric;
    fabric.register_endpoint(EndpointId::integrator());
    for (size_t i = 0; i < chiplets; ++i) {
        fabric.register_endpoint(EndpointId::chiplet(static_cast<uint32_t>(i)));
    }
    return fabric;
}

Message response_from(Fabric& fabric, uint32_t chiplet, std::vector<uint8_t> payload) {
    return fabric.make_message(EndpointId::chiplet(chiplet), EndpointId::integrator(),
                               MsgKind::Response, std::move(payload));
}

AdversaryHook at_chiplet(HookMode mode, uint32_t index) {
    AdversaryHook hook;
    hook.mode = std::move(mode);
    hook.placement = HookPlacement::MaliciousChiplet;
    hook.chiplet_index = static_cast<int32_t>(index);
    return hook;
}

}  // namespace

TEST_CASE("passive hook delivers payloads bit-identically and logs them") {
    Fabric fabric = small_fabric();
    AdversaryHook hook;
    hook.mode = hook::Passive{};
    fabric.add_hook(hook);

    const std::vector<uint8_t> payload{0xde, 0xad, 0xbe, 0xef};
    const auto outcome = fabric.send(response_from(fabric, 0, payload));
    CHECK(outcome.delivered());
    CHECK(outcome.message.payload == payload);
    REQUIRE(fabric.observed_payloads().size() == 1);
    CHECK(fabric.observed_payloads()[0] == payload);
}

TEST_CASE("tamper hook flips exactly the named bit") {
    Fabric fabric = small_fabric();
    AdversaryHook hook;
    hook.mode = hook::TamperBits{{0}};
    fabric.add_hook(hook);

    const std::vector<uint8_t> payload{0x00, 0xff};
    const auto outcome = fabric.send(response_from(fabric, 0, payload));
    REQUIRE(outcome.delivered());
    CHECK(outcome.message.payload[0] == 0x80);
    CHECK(outcome.message.payload[1] == 0xff);
}

TEST_CASE("drop hook swallows matching messages and records them") {
    Fabric fabric = small_fabric();
    fabric.add_hook(at_chiplet(hook::Drop{{EndpointId::integrator()}}, 2));

    const auto dropped = fabric.send(response_from(fabric, 2, {1, 2, 3}));
    CHECK_FALSE(dropped.delivered());
    REQUIRE(fabric.transcript().size() == 1);
    CHECK(fabric.transcript()[0].outcome == DeliveryStatus::Dropped);
    CHECK(fabric.transcript()[0].hooks == "drop@chiplet:2");
}

TEST_CASE("unregistered endpoints are a routing error") {
    Fabric fabric = small_fabric(1);
    Message msg = fabric.make_message(EndpointId::chiplet(0), EndpointId::chiplet(7),
                                      MsgKind::Control, {});
    CHECK_THROWS_AS(fabric.send(msg), RoutingError);
}

TEST_CASE("sequence numbers increase per channel") {
    Fabric fabric = small_fabric();
    const auto m1 = fabric.make_message(EndpointId::chiplet(0), EndpointId::integrator(),
                                        MsgKind::Response, {});
    const auto m2 = fabric.make_message(EndpointId::chiplet(0), EndpointId::integrator(),
                                        MsgKind::Response, {});
    const auto other = fabric.make_message(EndpointId::chiplet(1), EndpointId::integrator(),
                                           MsgKind::Response, {});
    CHECK(m1.seq == 1);
    CHECK(m2.seq == 2);
    CHECK(other.seq == 1);
}

TEST_CASE("record_and_replay re-injects a byte-identical copy with fresh seq") {
    Fabric fabric = small_fabric();
    const std::vector<uint8_t> payload{9, 8, 7};
    const auto first = fabric.send(response_from(fabric, 1, payload));
    REQUIRE(first.delivered());

    const auto replayed =
        fabric.record_and_replay(EndpointId::chiplet(1), EndpointId::integrator(), 1);
    CHECK(replayed.delivered());
    CHECK(replayed.message.payload == payload);
    CHECK(replayed.message.seq == 2);

    REQUIRE(fabric.transcript().size() == 2);
    const auto& entry = fabric.transcript()[1];
    REQUIRE(entry.replay_of.has_value());
    CHECK(*entry.replay_of == 1);
}

TEST_CASE("replaying a never-delivered seq is a replay-source error") {
    Fabric fabric = small_fabric();
    CHECK_THROWS_AS(
        fabric.record_and_replay(EndpointId::chiplet(0), EndpointId::integrator(), 3),
        ReplaySourceError);

    // A dropped message is not a valid replay source either.
    fabric.add_hook(at_chiplet(hook::Drop{{EndpointId::integrator()}}, 0));
    fabric.send(response_from(fabric, 0, {1}));
    CHECK_THROWS_AS(
        fabric.record_and_replay(EndpointId::chiplet(0), EndpointId::integrator(), 1),
        ReplaySourceError);
}

TEST_CASE("replay hook substitutes the recorded payload on later traffic") {
    Fabric fabric = small_fabric();
    const std::vector<uint8_t> old_payload{0xaa, 0xbb};
    fabric.send(response_from(fabric, 0, old_payload));

    fabric.add_hook(at_chiplet(hook::Replay{1}, 0));
    const auto outcome = fabric.send(response_from(fabric, 0, {0x11, 0x22}));
    REQUIRE(outcome.delivered());
    CHECK(outcome.message.payload == old_payload);
}

TEST_CASE("composing with a passive hook changes nothing") {
    std::mt19937_64 rng(51);
    std::vector<HookMode> modes;
    modes.emplace_back(hook::Passive{});
    modes.emplace_back(hook::TamperBits{{3, 9}});
    modes.emplace_back(hook::Drop{{EndpointId::integrator()}});
    modes.emplace_back(hook::Forge{{0x42}});
    modes.emplace_back(hook::Mitm{{0x0f, 0xf0}});
    modes.emplace_back(hook::Replay{1});

    for (const auto& mode : modes) {
        const auto payload = random_bytes(rng, 8);

        Fabric plain = small_fabric();
        plain.add_hook(at_chiplet(mode, 0));
        plain.send(response_from(plain, 0, payload));
        const auto without = plain.send(response_from(plain, 0, payload));

        Fabric composed = small_fabric();
        AdversaryHook passive;
        passive.mode = hook::Passive{};
        composed.add_hook(passive);
        composed.add_hook(at_chiplet(mode, 0));
        composed.send(response_from(composed, 0, payload));
        const auto with = composed.send(response_from(composed, 0, payload));

        CHECK(without.status == with.status);
        CHECK(without.message.payload == with.message.payload);
    }
}

TEST_CASE("every send yields exactly one transcript entry") {
    std::mt19937_64 rng(52);
    Fabric fabric = small_fabric();
    fabric.add_hook(at_chiplet(hook::Drop{{EndpointId::integrator()}}, 1));
    AdversaryHook tamper;
    tamper.mode = hook::TamperBits{{0}};
    tamper.placement = HookPlacement::InterposerFoundry;
    fabric.add_hook(tamper);

    const int sends = 100;
    for (int i = 0; i < sends; ++i) {
        const auto chiplet = static_cast<uint32_t>(uniform_below(rng, 4));
        fabric.send(response_from(fabric, chiplet, random_bytes(rng, 4)));
    }
    CHECK(fabric.transcript().size() == sends);
}

TEST_CASE("drop hooks are isolated to their target chiplet") {
    std::mt19937_64 rng(53);
    Fabric fabric = small_fabric();
    fabric.add_hook(at_chiplet(hook::Drop{{EndpointId::integrator()}}, 2));

    for (int i = 0; i < 50; ++i) {
        const auto chiplet = static_cast<uint32_t>(uniform_below(rng, 4));
        const auto payload = random_bytes(rng, 6);
        const auto outcome = fabric.send(response_from(fabric, chiplet, payload));
        if (chiplet == 2) {
            CHECK_FALSE(outcome.delivered());
        } else {
            CHECK(outcome.delivered());
            CHECK(outcome.message.payload == payload);
        }
    }
}

TEST_CASE("kind filter restricts a hook to one message kind") {
    Fabric fabric = small_fabric();
    AdversaryHook hook = at_chiplet(hook::TamperBits{{0}}, 0);
    hook.only_kind = MsgKind::Response;
    fabric.add_hook(hook);

    const std::vector<uint8_t> payload{0x00};
    const auto challenge = fabric.send(fabric.make_message(
        EndpointId::integrator(), EndpointId::chiplet(0), MsgKind::Challenge, payload));
    CHECK(challenge.message.payload == payload);

    const auto response = fabric.send(response_from(fabric, 0, payload));
    CHECK(response.message.payload != payload);
}

TEST_CASE("hop delay advances the logical clock per send") {
    Fabric fabric = small_fabric();
    fabric.set_hop_delay(5);
    fabric.send(response_from(fabric, 0, {}));
    CHECK(fabric.now() == 5);
    fabric.advance(96);
    fabric.send(response_from(fabric, 0, {}));
    CHECK(fabric.now() == 106);
    CHECK(fabric.transcript()[1].ts_cycles == 106);
}

TEST_CASE("transcript exports one JSON object per line") {
    Fabric fabric = small_fabric();
    fabric.send(response_from(fabric, 0, {0xab}));
    fabric.add_hook(at_chiplet(hook::Drop{{EndpointId::integrator()}}, 0));
    fabric.send(response_from(fabric, 0, {0xcd}));

    std::ostringstream out;
    fabric.export_jsonl(out);
    const std::string text = out.str();
    CHECK(text.find("\"payload_hex\":\"ab\"") != std::string::npos);
    CHECK(text.find("\"outcome\":\"dropped\"") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
