#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chanauth/channel_sim.hpp"
#include "chanauth/classifiers/model.hpp"
#include "chanauth/dataset_io.hpp"
#include "chanauth/preprocess.hpp"
#include "chanauth/sweep.hpp"

namespace chanauth::cfg {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Parsed INI-style file: [section] headers, key=value lines, '#'/';'
/// comments. Repeated keys accumulate in order.
struct RawConfig {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;

    const std::string* find(const std::string& section, const std::string& key) const;
    std::vector<std::string> find_all(const std::string& section, const std::string& key) const;
};

RawConfig parse_ini(const std::string& text, const std::string& name = "<memory>");
RawConfig load_ini(const std::filesystem::path& path);

/// Everything the CLI needs, resolved against built-in defaults.
struct HarnessConfig {
    sim::ScenarioConfig scenario;          ///< [scenario]
    std::size_t l_total = 10;              ///< [collection]
    std::size_t l_valid = 2;
    io::PartitionPolicy partition = io::PartitionPolicy::Ordered;
    std::uint64_t shuffle_seed = 0;
    prep::PreprocessConfig preprocess;     ///< [preprocess]
    std::vector<ml::Family> grid_families; ///< [gridsearch] families=..., default all
    harness::SweepConfig sweep;            ///< [sweep]
    bool sweep_section_present = false;
};

/// Defaults reproduce the published evaluation setup at desk scale
/// (N = 5000 per trace); paper_scale raises N to 100000.
HarnessConfig default_config();

/// Applies a parsed file on top of default_config(). Unknown sections or
/// keys raise ConfigError, as do malformed values.
HarnessConfig resolve_config(const RawConfig& raw);

} // namespace chanauth::cfg
