#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mclab/chain.hpp"
#include "mclab/lemmas.hpp"

namespace mclab {

extern const char* kToolName;
extern const char* kToolVersion;

struct AnalyzeOptions {
  int horizon = 4096;
  std::uint64_t seed = 0;
  int n_paths = 20000;
  int clt_steps = 4096;
  int bridge_horizon = 256;
  int mix_bridge_horizon = 256;
  std::vector<int> eta_grid = {1024, 2048, 4096};
  // Resource caps; exceeding the hard ones raises ResourceCap (CLI exit 3).
  int max_states = 512;
  int max_horizon = 8192;
  int max_states_full_bridge = 64;  ///< above this, pair-conditioned horizons shrink
  int max_states_simulation = 64;   ///< above this, the CLT simulation is skipped
};

/// Full analysis pipeline: classification, operator table, condition
/// diagnostics, variance profile and (for totally ergodic chains) the
/// centered-CLT simulation. The report is a pure function of
/// (chain, options, seed) except for the "timings" subtree.
nlohmann::ordered_json analyze_report(const ChainModel& chain, const AnalyzeOptions& opts,
                                      const std::string& fingerprint);

nlohmann::ordered_json lemmas_report(const LemmaCampaignOptions& opts);

/// FNV-1a 64-bit content hash, 16 hex characters.
std::string fingerprint_hex(const std::string& content);

/// Copy of the report with the timing subtree removed (byte-identity checks).
nlohmann::ordered_json strip_timings(nlohmann::ordered_json report);

/// Flat path,value projection of a JSON report for spreadsheet triage.
std::string flat_csv(const nlohmann::ordered_json& doc);

/// Structural validation against the subset of JSON Schema shipped with the
/// tool (type / required / properties / items / enum / additionalProperties).
bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                     std::string* why = nullptr);

}  // namespace mclab
