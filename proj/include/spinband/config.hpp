#pragma once

#include "spinband/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace spinband
{

// Raised for unreadable, malformed or invalid configuration input.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class ModeSelection
{
    with_spin,
    without_spin,
    both,
};

struct ExperimentConfig
{
    ScenarioConfig scenario;
    int drops = 50;
    std::uint64_t base_seed = 0; // drop d uses base_seed + d
    ModeSelection modes = ModeSelection::both;
    std::string output_dir = "results";
};

// Parses a JSON document. Unknown keys are rejected so that typos do not
// silently fall back to defaults. Scenario keys live at the top level; the
// optional "experiment" object holds drops, base_seed, modes, output_dir.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string config_to_json(const ExperimentConfig& config);

ModeSelection parse_modes(const std::string& text);
std::string to_string(ModeSelection m);

} // namespace spinband
