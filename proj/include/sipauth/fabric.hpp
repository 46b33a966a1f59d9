#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sipauth/errors.hpp"

namespace sipauth {

/// Endpoint on the interposer: the integrator's evaluator or a chiplet.
struct EndpointId {
    int32_t value = -1;  // -1 = integrator, >= 0 = chiplet index

    static EndpointId integrator() { return {-1}; }
    static EndpointId chiplet(uint32_t index) { return {static_cast<int32_t>(index)}; }

    bool is_integrator() const { return value < 0; }
    uint32_t chiplet_index() const { return static_cast<uint32_t>(value); }
    std::string name() const;

    auto operator<=>(const EndpointId&) const = default;
};

enum class MsgKind : uint8_t { Challenge, Response, Control };

const char* msg_kind_name(MsgKind kind);

struct Message {
    EndpointId src;
    EndpointId dst;
    uint64_t seq = 0;  ///< strictly increasing per (src, dst) channel
    MsgKind kind = MsgKind::Control;
    std::vector<uint8_t> payload;
};

namespace hook {

/// Observes and logs payloads without altering them (probing adversary).
struct Passive {};

/// Flips the given payload bit positions (MSB-first within each byte);
/// out-of-range positions are ignored.
struct TamperBits {
    std::vector<size_t> positions;
};

/// Substitutes the payload recorded for this channel at `seq`, if that
/// message was delivered earlier; otherwise leaves the message alone.
struct Replay {
    uint64_t seq = 0;
};

/// Swallows messages addressed to any endpoint in `dsts`.
struct Drop {
    std::set<EndpointId> dsts;
};

/// Replaces the payload with adversary-crafted bytes.
struct Forge {
    std::vector<uint8_t> payload;
};

/// Rewrites the payload by XOR with a repeating mask.
struct Mitm {
    std::vector<uint8_t> xor_mask;
};

}  // namespace hook

using HookMode =
    std::variant<hook::Passive, hook::TamperBits, hook::Replay, hook::Drop, hook::Forge,
                 hook::Mitm>;

/// Where the adversary sits, which both scopes the messages it can touch
/// and orders composition: a malicious chiplet acts at the source, the
/// foundry inside the fabric, a malicious integrator at the sink.
enum class HookPlacement : uint8_t { MaliciousChiplet, InterposerFoundry, Integrator };

struct AdversaryHook {
    HookMode mode;
    HookPlacement placement = HookPlacement::InterposerFoundry;
    int32_t chiplet_index = -1;            ///< scope for MaliciousChiplet placement
    std::optional<MsgKind> only_kind;      ///< restrict to one message kind

    std::string describe() const;
};

enum class DeliveryStatus : uint8_t { Delivered, Dropped };

struct SendOutcome {
    DeliveryStatus status = DeliveryStatus::Delivered;
    Message message;  ///< as delivered (post-hooks); last state before drop otherwise

    bool delivered() const { return status == DeliveryStatus::Delivered; }
};

struct TranscriptEntry {
    uint64_t ts_cycles = 0;
    EndpointId src;
    EndpointId dst;
    uint64_t seq = 0;
    MsgKind kind = MsgKind::Control;
    std::string hooks;  ///< comma-joined tags of hooks that acted, empty if none
    DeliveryStatus outcome = DeliveryStatus::Delivered;
    std::vector<uint8_t> payload;           ///< payload as delivered (or at drop)
    std::optional<uint64_t> replay_of;      ///< original seq for re-injected copies
};

/// Simulated interposer: a star fabric with one total order of events,
/// per-channel sequence numbers, adversary hooks, and an append-only
/// transcript. Deterministic given the same call sequence.
class Fabric {
public:
    void register_endpoint(EndpointId id);
    bool registered(EndpointId id) const;

    void add_hook(AdversaryHook hook);
    void clear_hooks();
    size_t hook_count() const { return hooks_.size(); }

    void set_hop_delay(uint32_t cycles) { hop_delay_ = cycles; }
    uint64_t now() const { return now_cycles_; }
    void advance(uint64_t cycles) { now_cycles_ += cycles; }

    /// Builds a message with the next sequence number of its channel.
    Message make_message(EndpointId src, EndpointId dst, MsgKind kind,
                         std::vector<uint8_t> payload);

    /// Applies every in-scope hook in placement order, appends exactly one
    /// transcript entry, and returns the outcome. Throws RoutingError for
    /// unregistered endpoints.
    SendOutcome send(const Message& msg);

    /// Re-injects a byte-identical copy of the delivered (src, dst, seq)
    /// message under a fresh sequence number; the transcript marks it as
    /// replayed. Throws ReplaySourceError if no such delivery exists.
    SendOutcome record_and_replay(EndpointId src, EndpointId dst, uint64_t seq);

    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

    /// Payloads copied by Passive hooks, in observation order.
    const std::vector<std::vector<uint8_t>>& observed_payloads() const { return observed_; }

    /// One JSON object per transcript entry:
    /// ts_cycles, src, dst, seq, kind, hook, outcome, payload_hex[, replay_of].
    void export_jsonl(std::ostream& out) const;

private:
    SendOutcome deliver(Message msg, std::optional<uint64_t> replay_of);
    const TranscriptEntry* find_delivered(EndpointId src, EndpointId dst, uint64_t seq) const;

    std::set<EndpointId> endpoints_;
    std::vector<AdversaryHook> hooks_;
    std::map<std::pair<EndpointId, EndpointId>, uint64_t> next_seq_;
    std::vector<TranscriptEntry> transcript_;
    std::vector<std::vector<uint8_t>> observed_;
    uint64_t now_cycles_ = 0;
    uint32_t hop_delay_ = 0;
};

}  // namespace sipauth
