#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blowuplab/criteria.hpp"
#include "blowuplab/field.hpp"
#include "blowuplab/model.hpp"
#include "blowuplab/simulator.hpp"

namespace blowuplab::scenario {

// One scenario file drives both `check` and `simulate`, so criteria and
// simulation always share identical initial data and constants.
struct Scenario {
    ModelParams model;
    criteria::SystemSpec system;
    criteria::GateOptions gate_options;
    InitialDataSpec initial;
    std::optional<sim::SimConfig> simcfg;
    sim::IdentityTolerances tolerances;
    std::string out_dir;
    std::vector<std::string> formats{"csv", "json"};
    std::string source_path;
    std::string raw_bytes;
};

/// Parses and schema-validates a scenario file. Unknown keys are rejected by
/// name; malformed JSON is reported with line and column.
Scenario load(const std::string& path);

/// Applies a `--override key=value` (dotted path into the JSON document) and
/// reparses.
Scenario load_with_overrides(const std::string& path,
                             const std::vector<std::string>& overrides);

struct RunManifest {
    std::string scenario_hash;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::string created_utc; // informational; not part of the determinism contract
    std::vector<std::string> artifacts;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string read_file(const std::string& path);

extern const char* const tool_version;

} // namespace blowuplab::scenario
