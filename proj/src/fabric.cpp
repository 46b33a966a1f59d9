#include "sipauth/fabric.hpp"

#include <algorithm>
#include <ostream>

#include "json.hpp"

namespace sipauth {

namespace {

std::string hex_bytes(const std::vector<uint8_t>& bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

int placement_rank(HookPlacement p) {
    switch (p) {
        case HookPlacement::MaliciousChiplet:
            return 0;
        case HookPlacement::InterposerFoundry:
            return 1;
        case HookPlacement::Integrator:
            return 2;
    }
    return 3;
}

bool in_scope(const AdversaryHook& hook, const Message& msg) {
    if (hook.only_kind.has_value() && msg.kind != *hook.only_kind) {
        return false;
    }
    switch (hook.placement) {
        case HookPlacement::MaliciousChiplet: {
            const EndpointId target = EndpointId::chiplet(static_cast<uint32_t>(hook.chiplet_index));
            return msg.src == target || msg.dst == target;
        }
        case HookPlacement::InterposerFoundry:
            return true;
        case HookPlacement::Integrator:
            return msg.src.is_integrator() || msg.dst.is_integrator();
    }
    return false;
}

const char* mode_tag(const HookMode& mode) {
    struct Visitor {
        const char* operator()(const hook::Passive&) const { return "passive"; }
        const char* operator()(const hook::TamperBits&) const { return "tamper"; }
        const char* operator()(const hook::Replay&) const { return "replay"; }
        const char* operator()(const hook::Drop&) const { return "drop"; }
        const char* operator()(const hook::Forge&) const { return "forge"; }
        const char* operator()(const hook::Mitm&) const { return "mitm"; }
    };
    return std::visit(Visitor{}, mode);
}

const char* placement_tag(HookPlacement p) {
    switch (p) {
        case HookPlacement::MaliciousChiplet:
            return "chiplet";
        case HookPlacement::InterposerFoundry:
            return "interposer";
        case HookPlacement::Integrator:
            return "integrator";
    }
    return "?";
}

}  // namespace

std::string EndpointId::name() const {
    if (is_integrator()) {
        return "integrator";
    }
    return "chiplet" + std::to_string(value);
}

const char* msg_kind_name(MsgKind kind) {
    switch (kind) {
        case MsgKind::Challenge:
            return "challenge";
        case MsgKind::Response:
            return "response";
        case MsgKind::Control:
            return "control";
    }
    return "?";
}

std::string AdversaryHook::describe() const {
    std::string out = mode_tag(mode);
    out += '@';
    out += placement_tag(placement);
    if (placement == HookPlacement::MaliciousChiplet) {
        out += ':';
        out += std::to_string(chiplet_index);
    }
    return out;
}

void Fabric::register_endpoint(EndpointId id) {
    endpoints_.insert(id);
}

bool Fabric::registered(EndpointId id) const {
    return endpoints_.count(id) != 0;
}

void Fabric::add_hook(AdversaryHook hook) {
    hooks_.push_back(std::move(hook));
    // Composition follows placement order; registration order breaks ties.
    std::stable_sort(hooks_.begin(), hooks_.end(), [](const auto& a, const auto& b) {
        return placement_rank(a.placement) < placement_rank(b.placement);
    });
}

void Fabric::clear_hooks() {
    hooks_.clear();
}

Message Fabric::make_message(EndpointId src, EndpointId dst, MsgKind kind,
                             std::vector<uint8_t> payload) {
    Message msg;
    msg.src = src;
    msg.dst = dst;
    msg.seq = ++next_seq_[{src, dst}];
    msg.kind = kind;
    msg.payload = std::move(payload);
    return msg;
}

const TranscriptEntry* Fabric::find_delivered(EndpointId src, EndpointId dst,
                                              uint64_t seq) const {
    for (const auto& e : transcript_) {
        if (e.src == src && e.dst == dst && e.seq == seq &&
            e.outcome == DeliveryStatus::Delivered) {
            return &e;
        }
    }
    return nullptr;
}

SendOutcome Fabric::deliver(Message msg, std::optional<uint64_t> replay_of) {
    if (!registered(msg.src)) {
        throw RoutingError("unregistered source endpoint " + msg.src.name());
    }
    if (!registered(msg.dst)) {
        throw RoutingError("unregistered destination endpoint " + msg.dst.name());
    }

    std::string applied;
    bool dropped = false;
    for (const auto& h : hooks_) {
        if (!in_scope(h, msg)) {
            continue;
        }
        bool acted = true;
        if (const auto* passive = std::get_if<hook::Passive>(&h.mode)) {
            (void)passive;
            observed_.push_back(msg.payload);
        } else if (const auto* tamper = std::get_if<hook::TamperBits>(&h.mode)) {
            for (size_t pos : tamper->positions) {
                if (pos / 8 < msg.payload.size()) {
                    msg.payload[pos / 8] ^= static_cast<uint8_t>(0x80u >> (pos % 8));
                }
            }
        } else if (const auto* replay = std::get_if<hook::Replay>(&h.mode)) {
            const TranscriptEntry* rec = find_delivered(msg.src, msg.dst, replay->seq);
            if (rec != nullptr) {
                msg.payload = rec->payload;
            } else {
                acted = false;
            }
        } else if (const auto* drop = std::get_if<hook::Drop>(&h.mode)) {
            if (drop->dsts.count(msg.dst) != 0) {
                dropped = true;
            } else {
                acted = false;
            }
        } else if (const auto* forge = std::get_if<hook::Forge>(&h.mode)) {
            msg.payload = forge->payload;
        } else if (const auto* mitm = std::get_if<hook::Mitm>(&h.mode)) {
            if (!mitm->xor_mask.empty()) {
                for (size_t i = 0; i < msg.payload.size(); ++i) {
                    msg.payload[i] ^= mitm->xor_mask[i % mitm->xor_mask.size()];
                }
            } else {
                acted = false;
            }
        }
        if (acted) {
            if (!applied.empty()) {
                applied += ',';
            }
            applied += h.describe();
        }
        if (dropped) {
            break;  // nothing downstream sees a dropped message
        }
    }

    now_cycles_ += hop_delay_;

    TranscriptEntry entry;
    entry.ts_cycles = now_cycles_;
    entry.src = msg.src;
    entry.dst = msg.dst;
    entry.seq = msg.seq;
    entry.kind = msg.kind;
    entry.hooks = applied;
    entry.outcome = dropped ? DeliveryStatus::Dropped : DeliveryStatus::Delivered;
    entry.payload = msg.payload;
    entry.replay_of = replay_of;
    transcript_.push_back(entry);

    SendOutcome outcome;
    outcome.status = entry.outcome;
    outcome.message = std::move(msg);
    return outcome;
}

SendOutcome Fabric::send(const Message& msg) {
    return deliver(msg, std::nullopt);
}

SendOutcome Fabric::record_and_replay(EndpointId src, EndpointId dst, uint64_t seq) {
    const TranscriptEntry* rec = find_delivered(src, dst, seq);
    if (rec == nullptr) {
        throw ReplaySourceError("no delivered message on channel " + src.name() + "->" +
                                dst.name() + " with seq " + std::to_string(seq));
    }
    Message copy = make_message(src, dst, rec->kind, rec->payload);
    return deliver(std::move(copy), seq);
}

void Fabric::export_jsonl(std::ostream& out) const {
    for (const auto& e : transcript_) {
        nlohmann::ordered_json line;
        line["ts_cycles"] = e.ts_cycles;
        line["src"] = e.src.name();
        line["dst"] = e.dst.name();
        line["seq"] = e.seq;
        line["kind"] = msg_kind_name(e.kind);
        line["hook"] = e.hooks;
        line["outcome"] = e.outcome == DeliveryStatus::Delivered ? "delivered" : "dropped";
        line["payload_hex"] = hex_bytes(e.payload);
        if (e.replay_of.has_value()) {
            line["replay_of"] = *e.replay_of;
        }
        out << line.dump() << '\n';
    }
}

}  // namespace sipauth
