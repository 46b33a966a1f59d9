#include "sipauth/scenario.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "sipauth/errors.hpp"

namespace sipauth {

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
    std::string msg = source;
    if (line > 0) {
        msg += ":" + std::to_string(line);
    }
    throw ConfigError(msg + ": " + what);
}

uint64_t parse_u64(const std::string& source, int line, const std::string& key,
                   const std::string& value) {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
        fail(source, line, "key '" + key + "' expects an unsigned integer, got '" + value + "'");
    }
    try {
        return std::stoull(value);
    } catch (const std::exception&) {
        fail(source, line, "key '" + key + "' value out of range: '" + value + "'");
    }
}

bool parse_bool(const std::string& source, int line, const std::string& key,
                const std::string& value) {
    if (value == "true") {
        return true;
    }
    if (value == "false") {
        return false;
    }
    fail(source, line, "key '" + key + "' expects true or false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& source, int line, const std::string& key,
                                    const std::string& value) {
    if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
        fail(source, line, "key '" + key + "' expects a bracketed list, got '" + value + "'");
    }
    std::vector<std::string> items;
    std::string body = value.substr(1, value.size() - 2);
    std::string item;
    std::istringstream in(body);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

std::vector<uint8_t> parse_hex(const std::string& spec, const std::string& what,
                               const std::string& value) {
    if (value.size() % 2 != 0) {
        throw ConfigError("hook '" + spec + "': " + what + " needs an even-length hex string");
    }
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ConfigError("hook '" + spec + "': " + what + " has non-hex character '" +
                          std::string(1, c) + "'");
    };
    std::vector<uint8_t> out;
    out.reserve(value.size() / 2);
    for (size_t i = 0; i < value.size(); i += 2) {
        out.push_back(static_cast<uint8_t>((nibble(value[i]) << 4) | nibble(value[i + 1])));
    }
    return out;
}

EndpointId parse_endpoint(const std::string& spec, const std::string& token) {
    if (token == "integrator") {
        return EndpointId::integrator();
    }
    if (token.rfind("chiplet:", 0) == 0) {
        const std::string idx = token.substr(8);
        if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError("hook '" + spec + "': bad chiplet index '" + idx + "'");
        }
        return EndpointId::chiplet(static_cast<uint32_t>(std::stoul(idx)));
    }
    throw ConfigError("hook '" + spec + "': unknown endpoint '" + token +
                      "' (expected integrator or chiplet:<i>)");
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep)) {
        parts.push_back(part);
    }
    return parts;
}

Campaign parse_campaign(const std::string& source, int line, const std::string& value) {
    if (value == "boot") return Campaign::Boot;
    if (value == "enroll") return Campaign::EnrollOnly;
    if (value == "tamper_exhaustive") return Campaign::TamperExhaustive;
    if (value == "hd_sweep") return Campaign::HdSweep;
    if (value == "replay_test") return Campaign::ReplayTest;
    if (value == "dos_test") return Campaign::DosTest;
    if (value == "forge_test") return Campaign::ForgeTest;
    if (value == "removal_probe") return Campaign::RemovalProbe;
    if (value == "complexity") return Campaign::Complexity;
    fail(source, line, "unknown campaign '" + value + "'");
}

FaultStage parse_stage(const std::string& source, int line, const std::string& value) {
    if (value == "signature") return FaultStage::Signature;
    if (value == "encoding-label") return FaultStage::EncodingLabel;
    if (value == "garbled-word") return FaultStage::GarbledWord;
    if (value == "digest-input") return FaultStage::DigestInput;
    fail(source, line, "unknown fault stage '" + value + "'");
}

}  // namespace

const char* campaign_name(Campaign c) {
    switch (c) {
        case Campaign::Boot:
            return "boot";
        case Campaign::EnrollOnly:
            return "enroll";
        case Campaign::TamperExhaustive:
            return "tamper_exhaustive";
        case Campaign::HdSweep:
            return "hd_sweep";
        case Campaign::ReplayTest:
            return "replay_test";
        case Campaign::DosTest:
            return "dos_test";
        case Campaign::ForgeTest:
            return "forge_test";
        case Campaign::RemovalProbe:
            return "removal_probe";
        case Campaign::Complexity:
            return "complexity";
    }
    return "?";
}

const char* fault_stage_name(FaultStage s) {
    switch (s) {
        case FaultStage::Signature:
            return "signature";
        case FaultStage::EncodingLabel:
            return "encoding-label";
        case FaultStage::GarbledWord:
            return "garbled-word";
        case FaultStage::DigestInput:
            return "digest-input";
    }
    return "?";
}

AdversaryHook parse_hook_spec(const std::string& spec) {
    const auto at = spec.rfind('@');
    if (at == std::string::npos) {
        throw ConfigError("hook '" + spec + "': missing @placement");
    }
    const std::string lhs = trim(spec.substr(0, at));
    const std::string placement = trim(spec.substr(at + 1));

    AdversaryHook hook;
    if (placement == "interposer") {
        hook.placement = HookPlacement::InterposerFoundry;
    } else if (placement == "integrator") {
        hook.placement = HookPlacement::Integrator;
    } else if (placement.rfind("chiplet:", 0) == 0) {
        const std::string idx = placement.substr(8);
        if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError("hook '" + spec + "': bad placement chiplet index '" + idx + "'");
        }
        hook.placement = HookPlacement::MaliciousChiplet;
        hook.chiplet_index = static_cast<int32_t>(std::stoul(idx));
    } else {
        throw ConfigError("hook '" + spec + "': unknown placement '" + placement +
                          "' (expected interposer, integrator, or chiplet:<i>)");
    }

    std::string mode = lhs;
    std::map<std::string, std::string> args;
    const auto open = lhs.find('(');
    if (open != std::string::npos) {
        if (lhs.back() != ')') {
            throw ConfigError("hook '" + spec + "': unbalanced parentheses");
        }
        mode = trim(lhs.substr(0, open));
        const std::string body = lhs.substr(open + 1, lhs.size() - open - 2);
        for (const auto& kv : split_on(body, ';')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("hook '" + spec + "': argument '" + kv + "' is not key=value");
            }
            args[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
        }
    }

    if (const auto it = args.find("kind"); it != args.end()) {
        if (it->second == "challenge") {
            hook.only_kind = MsgKind::Challenge;
        } else if (it->second == "response") {
            hook.only_kind = MsgKind::Response;
        } else if (it->second == "control") {
            hook.only_kind = MsgKind::Control;
        } else {
            throw ConfigError("hook '" + spec + "': unknown kind '" + it->second + "'");
        }
        args.erase(it);
    }

    auto take = [&](const char* key) -> std::string {
        const auto it = args.find(key);
        if (it == args.end()) {
            throw ConfigError("hook '" + spec + "': missing argument '" + std::string(key) + "'");
        }
        std::string v = it->second;
        args.erase(it);
        return v;
    };

    if (mode == "passive") {
        hook.mode = hook::Passive{};
    } else if (mode == "tamper") {
        hook::TamperBits tamper;
        for (const auto& tok : split_on(take("bits"), '|')) {
            if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
                throw ConfigError("hook '" + spec + "': bad bit position '" + tok + "'");
            }
            tamper.positions.push_back(std::stoull(tok));
        }
        hook.mode = std::move(tamper);
    } else if (mode == "drop") {
        hook::Drop drop;
        for (const auto& tok : split_on(take("dst"), '|')) {
            drop.dsts.insert(parse_endpoint(spec, trim(tok)));
        }
        hook.mode = std::move(drop);
    } else if (mode == "forge") {
        hook.mode = hook::Forge{parse_hex(spec, "payload_hex", take("payload_hex"))};
    } else if (mode == "mitm") {
        hook.mode = hook::Mitm{parse_hex(spec, "xor_hex", take("xor_hex"))};
    } else if (mode == "replay") {
        const std::string seq = take("seq");
        if (seq.empty() || seq.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError("hook '" + spec + "': bad seq '" + seq + "'");
        }
        hook.mode = hook::Replay{std::stoull(seq)};
    } else {
        throw ConfigError("hook '" + spec + "': unknown mode '" + mode + "'");
    }

    if (!args.empty()) {
        throw ConfigError("hook '" + spec + "': unexpected argument '" + args.begin()->first +
                          "'");
    }
    return hook;
}

ScenarioConfig ScenarioConfig::parse(std::istream& in, const std::string& source_name) {
    std::map<std::string, RawEntry> raw;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(source_name, lineno, "expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            fail(source_name, lineno, "empty key");
        }
        if (raw.count(key) != 0) {
            fail(source_name, lineno,
                 "duplicate key '" + key + "' (first set on line " +
                     std::to_string(raw[key].line) + ")");
        }
        raw[key] = {value, lineno};
    }

    ScenarioConfig cfg;
    auto consume = [&](const char* key) -> std::optional<RawEntry> {
        const auto it = raw.find(key);
        if (it == raw.end()) {
            return std::nullopt;
        }
        RawEntry entry = it->second;
        raw.erase(it);
        return entry;
    };

    if (const auto e = consume("campaign")) {
        cfg.campaign = parse_campaign(source_name, e->line, e->value);
    }
    if (const auto e = consume("kappa")) {
        cfg.params.kappa = static_cast<uint32_t>(parse_u64(source_name, e->line, "kappa", e->value));
        cfg.kappa_set = true;
    }
    if (const auto e = consume("width")) {
        cfg.params.width = static_cast<uint32_t>(parse_u64(source_name, e->line, "width", e->value));
        cfg.width_set = true;
    }
    if (const auto e = consume("n_chiplets")) {
        cfg.n_chiplets =
            static_cast<uint32_t>(parse_u64(source_name, e->line, "n_chiplets", e->value));
        cfg.n_chiplets_set = true;
    }
    if (const auto e = consume("seed")) {
        cfg.seed = parse_u64(source_name, e->line, "seed", e->value);
        cfg.seed_set = true;
    }
    if (const auto e = consume("adversary")) {
        for (const auto& item : split_list(source_name, e->line, "adversary", e->value)) {
            cfg.adversary.push_back(parse_hook_spec(item));
        }
    }
    if (const auto e = consume("output")) {
        cfg.output = e->value;
    }
    if (const auto e = consume("format")) {
        if (e->value != "csv" && e->value != "json") {
            fail(source_name, e->line, "key 'format' expects csv or json");
        }
        cfg.format = e->value;
    }
    if (const auto e = consume("transcript")) {
        cfg.transcript = e->value;
    }
    if (const auto e = consume("kappas")) {
        for (const auto& item : split_list(source_name, e->line, "kappas", e->value)) {
            cfg.kappas.push_back(
                static_cast<uint32_t>(parse_u64(source_name, e->line, "kappas", item)));
        }
    }
    if (const auto e = consume("widths")) {
        for (const auto& item : split_list(source_name, e->line, "widths", e->value)) {
            cfg.widths.push_back(
                static_cast<uint32_t>(parse_u64(source_name, e->line, "widths", item)));
        }
    }
    if (const auto e = consume("trials")) {
        cfg.trials = static_cast<uint32_t>(parse_u64(source_name, e->line, "trials", e->value));
        cfg.trials_set = true;
    }
    if (const auto e = consume("stage")) {
        cfg.stage = parse_stage(source_name, e->line, e->value);
    }
    if (const auto e = consume("boots")) {
        cfg.boots = static_cast<uint32_t>(parse_u64(source_name, e->line, "boots", e->value));
    }
    if (const auto e = consume("otp_slots")) {
        cfg.otp_slots =
            static_cast<uint32_t>(parse_u64(source_name, e->line, "otp_slots", e->value));
    }
    if (const auto e = consume("fabric_delay")) {
        cfg.fabric_delay =
            static_cast<uint32_t>(parse_u64(source_name, e->line, "fabric_delay", e->value));
    }
    if (const auto e = consume("permissive_latency")) {
        cfg.permissive_latency = parse_bool(source_name, e->line, "permissive_latency", e->value);
    }
    if (const auto e = consume("target_chiplet")) {
        cfg.target_chiplet =
            static_cast<uint32_t>(parse_u64(source_name, e->line, "target_chiplet", e->value));
        cfg.target_set = true;
    }
    if (const auto e = consume("runs")) {
        cfg.runs = static_cast<uint32_t>(parse_u64(source_name, e->line, "runs", e->value));
    }

    if (!raw.empty()) {
        const auto& first = *raw.begin();
        fail(source_name, first.second.line, "unknown key '" + first.first + "'");
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    return parse(in, path);
}

void ScenarioConfig::validate() const {
    auto require = [&](bool present, const char* key) {
        if (!present) {
            throw ConfigError(std::string("missing required key '") + key + "' for campaign " +
                              campaign_name(campaign));
        }
    };

    const bool needs_assembly =
        campaign == Campaign::Boot || campaign == Campaign::EnrollOnly ||
        campaign == Campaign::TamperExhaustive || campaign == Campaign::ReplayTest ||
        campaign == Campaign::DosTest || campaign == Campaign::ForgeTest ||
        campaign == Campaign::RemovalProbe;

    if (campaign != Campaign::Complexity) {
        require(seed_set, "seed");
    }

    if (needs_assembly) {
        require(kappa_set, "kappa");
        require(width_set, "width");
        require(n_chiplets_set, "n_chiplets");
        if (params.kappa < 2 || params.kappa > 256) {
            throw ConfigError("kappa must be in [2, 256]");
        }
        if (params.width < 1 || params.width > 256) {
            throw ConfigError("width must be in [1, 256]");
        }
        if (n_chiplets < 1) {
            throw ConfigError("n_chiplets must be >= 1");
        }
        for (const auto& hook : adversary) {
            if (hook.placement == HookPlacement::MaliciousChiplet &&
                (hook.chiplet_index < 0 ||
                 static_cast<uint32_t>(hook.chiplet_index) >= n_chiplets)) {
                throw ConfigError("adversary hook chiplet index " +
                                  std::to_string(hook.chiplet_index) + " out of range for " +
                                  std::to_string(n_chiplets) + " chiplets");
            }
        }
    }

    switch (campaign) {
        case Campaign::Boot:
            if (boots < 1) {
                throw ConfigError("boots must be >= 1");
            }
            break;
        case Campaign::DosTest:
            require(target_set, "target_chiplet");
            if (target_chiplet >= n_chiplets) {
                throw ConfigError("target_chiplet out of range");
            }
            if (runs < 1) {
                throw ConfigError("runs must be >= 1");
            }
            break;
        case Campaign::TamperExhaustive:
        case Campaign::ReplayTest:
        case Campaign::ForgeTest:
        case Campaign::RemovalProbe:
            if (target_set && target_chiplet >= n_chiplets) {
                throw ConfigError("target_chiplet out of range");
            }
            break;
        case Campaign::HdSweep:
            require(!kappas.empty(), "kappas");
            require(!widths.empty(), "widths");
            require(trials_set, "trials");
            for (uint32_t k : kappas) {
                if (k < 2 || k > 256) {
                    throw ConfigError("sweep kappas must be in [2, 256]");
                }
            }
            for (uint32_t w : widths) {
                if (w < 1 || w > 256) {
                    throw ConfigError("sweep widths must be in [1, 256]");
                }
            }
            break;
        case Campaign::Complexity:
            require(!kappas.empty(), "kappas");
            require(!widths.empty(), "widths");
            break;
        case Campaign::EnrollOnly:
            break;
    }
}

}  // namespace sipauth
