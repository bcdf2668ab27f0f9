#pragma once

#include <filesystem>
#include <string>

#include "multitab/dataset.hpp"
#include "multitab/sample.hpp"
#include "multitab/table.hpp"

namespace mt_test {

inline std::filesystem::path source_path(const std::string& rel) {
    return std::filesystem::path(MULTITAB_SOURCE_DIR) / rel;
}

inline multitab::Table pets_table() {
    using multitab::Value;
    multitab::Table t;
    t.schema.table_name = "pets";
    t.schema.columns = {"PetID", "PetType", "pet_age", "weight"};
    t.schema.types = {multitab::ColumnType::Integer, multitab::ColumnType::Text, multitab::ColumnType::Integer,
                      multitab::ColumnType::Real};
    t.rows = {{Value(2001), Value("cat"), Value(3), Value(12.0)},
              {Value(2002), Value("dog"), Value(2), Value(13.4)},
              {Value(2003), Value("dog"), Value(1), Value(9.3)}};
    return t;
}

inline multitab::Database pets_db() {
    multitab::Database db("pets_1");
    db.add_table(pets_table());
    return db;
}

inline multitab::Table text_table(std::vector<std::string> columns, std::vector<std::vector<std::string>> rows) {
    multitab::Table t;
    t.schema.columns = std::move(columns);
    for (auto& r : rows) {
        multitab::Row row;
        for (auto& c : r) row.emplace_back(std::move(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// The fixture databases shipped under data/databases, loaded once.
inline const multitab::DatabaseSet& fixture_dbs() {
    static const multitab::DatabaseSet dbs = multitab::load_database_root(source_path("data/databases"));
    return dbs;
}

}  // namespace mt_test
