#pragma once

#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sipauth/integrator.hpp"
#include "sipauth/scenario.hpp"

namespace sipauth {

/// One sweep cell: fault-injection Hamming-distance statistics for a
/// (kappa, width) pair at one fault stage. Garbled-output HD is measured
/// over the flattened width*kappa bits (over the serialized stream for
/// the digest-input stage); digest HD over the 256 digest bits.
struct HdRow {
    uint32_t kappa = 0;
    uint32_t width = 0;
    FaultStage stage = FaultStage::GarbledWord;
    uint32_t trials = 0;
    double mean_garbled_hd_pct = 0;
    double mean_digest_hd_pct = 0;
    double max_digest_hd_pct = 0;
};

struct HdReport {
    std::vector<HdRow> rows;  ///< sorted by (kappa, width)
};

/// Runs `trials` single-bit fault injections per (kappa, width) cell.
/// Each cell owns private seed-derived randomness, so results are
/// independent of cell execution order. Throws ConfigError below the
/// 100-trial statistical floor.
HdReport hd_sweep(std::span<const uint32_t> kappas, std::span<const uint32_t> widths,
                  uint32_t trials, uint64_t seed,
                  FaultStage stage = FaultStage::GarbledWord);

struct ComplexityRow {
    uint32_t width = 0;
    uint32_t kappa = 0;
    uint64_t garbled_len = 0;
    boost::multiprecision::cpp_int total;  ///< garbled_len * 2^192, exact
    double log2_total = 0;
    bool log2_exact = false;  ///< true when garbled_len is a power of two
};

/// Replay work-factor table, sorted ascending by total complexity.
std::vector<ComplexityRow> complexity_report(std::span<const SecurityParams> params_list);

struct TamperExhaustiveReport {
    uint32_t fault_positions = 0;
    uint32_t faults_detected = 0;
    uint32_t wrong_signatures = 0;  ///< 0 when width is too wide to enumerate
    uint32_t wrong_detected = 0;
    std::vector<uint32_t> missed_positions;
};

/// Flips every single bit of the target chiplet's response payload (one
/// boot per position) and, for width <= 12, additionally forges every
/// wrong signature value garbled under the correct table. Every case is
/// expected to fail verification.
TamperExhaustiveReport tamper_exhaustive(const SecurityParams& params, uint32_t n_chiplets,
                                         uint32_t target, uint64_t seed);

struct ReplayReport {
    uint32_t replays = 0;
    uint32_t accepted = 0;
};

/// Re-injects a recorded first-boot response in place of the target's
/// fresh response across `replays` independent assemblies, each under a
/// fresh nonce; counts how many replays pass verification.
ReplayReport replay_campaign(const SecurityParams& params, uint32_t n_chiplets, uint32_t target,
                             uint32_t replays, uint64_t seed);

struct DosReport {
    uint32_t runs = 0;
    uint32_t runs_ok = 0;               ///< exactly the target flagged, all others pass
    uint32_t isolation_violations = 0;  ///< runs where a non-target chiplet failed
};

/// Drops the target chiplet's response traffic over `runs` seeded
/// assemblies and checks blame isolation.
DosReport dos_campaign(const SecurityParams& params, uint32_t n_chiplets, uint32_t target,
                       uint32_t runs, uint64_t seed);

struct ForgeReport {
    uint32_t attempts = 0;
    uint32_t accepted = 0;
};

/// Injects adversary-crafted responses built without the device secret;
/// counts acceptances (expected 0).
ForgeReport forge_campaign(const SecurityParams& params, uint32_t n_chiplets, uint32_t target,
                           uint32_t attempts, uint64_t seed);

struct ProbeStrategy {
    std::string name;
    uint64_t correct = 0;
    double accuracy_pct = 0;
};

struct ProbeReport {
    uint64_t observations = 0;
    std::vector<ProbeStrategy> strategies;
    double best_accuracy_pct = 0;
};

/// Passive-probe adversary: observes garbled response words on the
/// fabric across fresh sessions and guesses signature bits with a fixed
/// family of strategies; reports per-strategy and best accuracy against
/// the 50% chance line.
ProbeReport removal_probe(const SecurityParams& params, uint32_t n_chiplets,
                          uint64_t observations, uint64_t seed);

struct ScenarioResult {
    std::string report;         ///< report file contents
    std::string report_format;  ///< resolved "csv" or "json"
    std::string transcript;     ///< JSONL contents when the config asked for it
};

/// Executes the configured campaign deterministically and (by default)
/// writes the report to the configured path or stdout. The same config
/// and seed always produce byte-identical contents.
ScenarioResult run_scenario(const ScenarioConfig& config, bool write_files = true);

}  // namespace sipauth
