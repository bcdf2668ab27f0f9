#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "multitab/metrics.hpp"
#include "multitab/qc.hpp"
#include "multitab/synth.hpp"

namespace multitab {

/// Every tunable the CLI reads. Compiled-in defaults are mirrored by
/// config/defaults.json; a config file overrides them key by key and flags
/// override the file.
struct ToolConfig {
    std::uint64_t seed = 7;
    std::size_t workers = 1;
    std::string catalog = "data/templates/catalog.json";
    std::string db_root = "data/databases";

    std::size_t target_count = 1000;
    std::map<Category, double> category_mix = {{Category::Single, 0.3},
                                               {Category::Join, 0.4},
                                               {Category::Union, 0.1},
                                               {Category::Intersect, 0.1},
                                               {Category::Except, 0.1}};
    std::size_t max_instantiation_attempts = 50;

    QcConfig qc;                        // generation and cmd_qc
    bool import_oversize_check = true;  // benchmark imports
    MetricConfig metrics;

    GenConfig gen_config() const;
    std::string to_json() const;

    friend bool operator==(const ToolConfig&, const ToolConfig&);
};

/// Unknown keys and ill-typed values are errors (std::invalid_argument).
ToolConfig parse_config(std::string_view json_text, const ToolConfig& base = {});
ToolConfig load_config(const std::filesystem::path& path, const ToolConfig& base = {});

/// "single=0.3,join=0.7"; categories left out get 0.
std::map<Category, double> parse_category_mix(std::string_view spec);

}  // namespace multitab
