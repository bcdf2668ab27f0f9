#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "multitab/table.hpp"

namespace multitab {

/// One dataset record. table_names[i] names tables[i].
struct Sample {
    std::string id;
    std::string db_id;
    std::optional<std::string> query;
    std::optional<std::string> question;
    std::vector<std::string> table_names;
    std::vector<Table> tables;
    Table answer;
    // Generator provenance; absent for imported samples.
    std::optional<std::string> template_id;
    std::optional<std::string> category;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Databases addressed by name.
using DatabaseSet = std::map<std::string, Database, std::less<>>;

}  // namespace multitab
