#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sipauth/fabric.hpp"
#include "sipauth/garble.hpp"

namespace sipauth {

enum class Campaign : uint8_t {
    Boot,
    EnrollOnly,
    TamperExhaustive,
    HdSweep,
    ReplayTest,
    DosTest,
    ForgeTest,
    RemovalProbe,
    Complexity,
};

const char* campaign_name(Campaign c);

/// Pipeline point where the sweep injects its single-bit fault.
enum class FaultStage : uint8_t { Signature, EncodingLabel, GarbledWord, DigestInput };

const char* fault_stage_name(FaultStage s);

/// Declarative description of one simulator run. Parsed from a flat
/// `key = value` text file (lists in brackets, `#` comments); the seed
/// fully determines every pseudo-random choice in the run.
struct ScenarioConfig {
    Campaign campaign = Campaign::Boot;
    SecurityParams params{0, 0};
    uint32_t n_chiplets = 0;
    uint64_t seed = 0;
    std::vector<AdversaryHook> adversary;
    std::string output;      ///< report path; empty writes to stdout
    std::string format;      ///< "csv" or "json"; empty picks the campaign default
    std::string transcript;  ///< optional fabric transcript path (JSON lines)

    std::vector<uint32_t> kappas;  ///< sweep / complexity cells
    std::vector<uint32_t> widths;
    uint32_t trials = 0;
    FaultStage stage = FaultStage::GarbledWord;
    uint32_t boots = 1;
    uint32_t otp_slots = 8;
    uint32_t fabric_delay = 0;
    bool permissive_latency = true;
    uint32_t target_chiplet = 0;
    uint32_t runs = 50;

    bool seed_set = false;
    bool kappa_set = false;
    bool width_set = false;
    bool n_chiplets_set = false;
    bool trials_set = false;
    bool target_set = false;

    static ScenarioConfig parse(std::istream& in, const std::string& source_name);
    static ScenarioConfig parse_file(const std::string& path);

    /// Campaign-specific completeness and range checks; throws
    /// ConfigError naming the offending key.
    void validate() const;
};

/// Parses one adversary hook spec of the form `mode(args)@placement`,
/// e.g. `tamper(bits=32;kind=response)@chiplet:2`. Used by the config
/// parser; exposed for tests.
AdversaryHook parse_hook_spec(const std::string& spec);

}  // namespace sipauth
