#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "multitab/config.hpp"
#include "multitab/dataset.hpp"
#include "multitab/executor.hpp"
#include "multitab/linearizer.hpp"
#include "multitab/metrics.hpp"
#include "multitab/qc.hpp"
#include "multitab/sql/parser.hpp"
#include "multitab/sql/render.hpp"
#include "multitab/synth.hpp"

namespace py = pybind11;
using namespace multitab;

namespace {

py::object to_py(const Value& v) {
    if (v.is_null()) return py::none();
    if (v.is_integer()) return py::int_(v.as_integer());
    if (v.is_real()) return py::float_(v.as_real());
    return py::str(v.as_text());
}

Value from_py(const py::handle& h) {
    if (h.is_none()) return Value(Null{});
    if (py::isinstance<py::bool_>(h)) return Value(static_cast<std::int64_t>(h.cast<bool>()));
    if (py::isinstance<py::int_>(h)) return Value(h.cast<std::int64_t>());
    if (py::isinstance<py::float_>(h)) return Value(h.cast<double>());
    if (py::isinstance<py::str>(h)) return Value(h.cast<std::string>());
    throw py::type_error("cells must be None, int, float or str");
}

py::dict table_to_py(const Table& t) {
    py::dict d;
    if (t.schema.table_name) d["name"] = *t.schema.table_name;
    d["columns"] = t.schema.columns;
    py::list rows;
    for (const auto& r : t.rows) {
        py::list row;
        for (const auto& v : r) row.append(to_py(v));
        rows.append(row);
    }
    d["rows"] = rows;
    return d;
}

Table table_from_py(const py::dict& d) {
    Table t;
    if (d.contains("name") && !d["name"].is_none()) t.schema.table_name = d["name"].cast<std::string>();
    t.schema.columns = d["columns"].cast<std::vector<std::string>>();
    if (d.contains("rows")) {
        for (const auto& r : d["rows"]) {
            Row row;
            for (const auto& v : r) row.push_back(from_py(v));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

std::vector<Sample> samples_from_py(const py::list& items) {
    std::vector<Sample> out;
    auto dumps = py::module_::import("json").attr("dumps");
    std::size_t line = 0;
    for (const auto& item : items) out.push_back(sample_from_json_line(dumps(item).cast<std::string>(), ++line));
    return out;
}

py::list samples_to_py(const std::vector<Sample>& samples) {
    py::list out;
    for (const auto& s : samples) out.append(json_loads(sample_to_json_line(s)));
    return out;
}

MetricConfig metric_config(const std::string& row_mode, bool header_case_sensitive, const std::string& normalization) {
    MetricConfig cfg;
    auto mode = parse_row_mode(row_mode);
    if (!mode) throw py::value_error("unknown row mode '" + row_mode + "'");
    auto norm = parse_cell_normalization(normalization);
    if (!norm) throw py::value_error("unknown cell normalization '" + normalization + "'");
    cfg.row_mode = *mode;
    cfg.header_case_sensitive = header_case_sensitive;
    cfg.cell_normalization = *norm;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-table QA dataset toolkit: execution, linearization, generation, QC and metrics";

    py::register_exception<sql::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ExecError>(m, "ExecError", PyExc_RuntimeError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<LoadError>(m, "LoadError", PyExc_OSError);
    py::register_exception<DatasetError>(m, "DatasetError", PyExc_ValueError);
    py::register_exception<CatalogError>(m, "CatalogError", PyExc_ValueError);

    py::class_<Database>(m, "Database")
        .def_property_readonly("name", &Database::name)
        .def("table_names",
             [](const Database& db) {
                 std::vector<std::string> out;
                 for (const auto& t : db.tables()) out.push_back(t.name());
                 return out;
             })
        .def("table", [](const Database& db, const std::string& name) { return table_to_py(db.at(name)); })
        .def("__len__", &Database::size)
        .def("__repr__", [](const Database& db) { return "<Database " + db.name() + " with " +
                                                         std::to_string(db.size()) + " tables>"; });

    m.def("load_database", py::overload_cast<const std::filesystem::path&>(&load_database), py::arg("path"),
          "Loads a csv-dir database or a .sqlite file.");
    m.def(
        "database_from_tables",
        [](const std::string& name, const py::list& tables) {
            Database db(name);
            for (const auto& t : tables) db.add_table(table_from_py(t.cast<py::dict>()));
            return db;
        },
        py::arg("name"), py::arg("tables"));

    m.def("canonical_cell_text", [](const py::handle& v) { return canonical_cell_text(from_py(v)); });
    m.def(
        "execute",
        [](const std::string& sql, const Database& db) { return table_to_py(execute_text(sql, db)); },
        py::arg("sql"), py::arg("db"), "Runs one query; returns {'columns': [...], 'rows': [[...]]}.");
    m.def("normalize_sql", [](const std::string& sql) { return sql::render(sql::parse(sql)); });
    m.def("table_names", [](const std::string& sql) { return sql::extract_table_names(sql::parse(sql)); });
    m.def("repair_from_clause", &repair_from_clause, py::arg("query"), py::arg("placeholder") = "w");

    m.def("serialize_input_table", [](const py::dict& t) { return serialize_input_table(table_from_py(t)); });
    m.def("serialize_answer_table", [](const py::dict& t) { return serialize_answer_table(table_from_py(t)); });
    m.def("parse_answer_table", [](const std::string& s) {
        auto parsed = parse_answer_table(s);
        py::dict d = table_to_py(parsed.table);
        d["ragged"] = parsed.ragged;
        return d;
    });
    m.def(
        "build_model_input",
        [](const std::string& question, const py::list& tables) {
            std::vector<Table> ts;
            for (const auto& t : tables) ts.push_back(table_from_py(t.cast<py::dict>()));
            return build_model_input(question, ts);
        },
        py::arg("question"), py::arg("tables"));

    m.def(
        "check_sample",
        [](const std::string& sql, const Database& db, std::size_t row_cap, bool oversize_check) {
            QcConfig cfg;
            cfg.row_cap = row_cap;
            cfg.enable_oversize_check = oversize_check;
            const auto c = check_sample(sql, db, cfg);
            return py::make_tuple(c.verdict.keep, std::string(qc_reason_name(c.verdict.reason)), c.verdict.detail);
        },
        py::arg("sql"), py::arg("db"), py::arg("row_cap") = 10'000, py::arg("oversize_check") = false,
        "Returns (keep, reason, detail).");

    m.def(
        "generate",
        [](const std::string& db_root, const std::string& catalog, std::size_t count, std::uint64_t seed,
           std::optional<std::map<std::string, double>> mix, std::size_t workers) {
            ToolConfig tc;
            GenConfig cfg = tc.gen_config();
            cfg.target_count = count;
            cfg.seed = seed;
            cfg.workers = workers;
            if (mix) {
                cfg.category_mix.clear();
                for (const auto& [name, p] : *mix) {
                    auto c = parse_category(name);
                    if (!c) throw py::value_error("unknown category '" + name + "'");
                    cfg.category_mix[*c] = p;
                }
            }
            cfg.validate();
            GenResult r;
            {
                py::gil_scoped_release release;
                r = generate(load_database_root(db_root), load_catalog(catalog), cfg);
            }
            py::dict out;
            out["samples"] = samples_to_py(r.samples);
            out["shortfall"] = r.shortfall;
            out["attempts"] = r.attempts;
            out["rejected"] = json_loads(r.rejected.to_json());
            return out;
        },
        py::arg("db_root"), py::arg("catalog"), py::arg("count"), py::arg("seed") = 7, py::arg("mix") = py::none(),
        py::arg("workers") = 1);

    m.def(
        "run_qc",
        [](const py::list& samples, const std::string& db_root, std::size_t row_cap, bool oversize_check,
           std::size_t workers) {
            QcConfig cfg;
            cfg.row_cap = row_cap;
            cfg.enable_oversize_check = oversize_check;
            const auto in = samples_from_py(samples);
            QcOutcome outcome;
            {
                py::gil_scoped_release release;
                outcome = run_qc(in, load_database_root(db_root), cfg, workers);
            }
            py::dict out;
            out["kept"] = samples_to_py(outcome.kept);
            out["stats"] = json_loads(outcome.stats.to_json());
            return out;
        },
        py::arg("samples"), py::arg("db_root"), py::arg("row_cap") = 10'000, py::arg("oversize_check") = false,
        py::arg("workers") = 1);

    m.def("read_dataset", [](const std::filesystem::path& p) { return samples_to_py(read_dataset(p)); });
    m.def("write_dataset", [](const py::list& samples, const std::filesystem::path& p) {
        write_dataset(samples_from_py(samples), p);
    });
    m.def("sample_source", [](const py::dict& s) {
        return sample_source(samples_from_py(py::list(py::make_tuple(s)))[0]);
    });
    m.def("sample_target", [](const py::dict& s) {
        return sample_target(samples_from_py(py::list(py::make_tuple(s)))[0]);
    });

    m.def(
        "evaluate",
        [](const std::vector<std::string>& predictions, const std::vector<std::string>& targets,
           const std::string& row_mode, bool header_case_sensitive, const std::string& normalization) {
            if (predictions.size() != targets.size()) throw py::value_error("predictions and targets differ in length");
            std::vector<Table> gold;
            for (const auto& t : targets) gold.push_back(parse_answer_table(t).table);
            const auto pairs = pair_predictions(predictions, gold);
            const auto report = evaluate_corpus(pairs, metric_config(row_mode, header_case_sensitive, normalization));
            return json_loads(report.to_json());
        },
        py::arg("predictions"), py::arg("targets"), py::arg("row_mode") = "set-within-row",
        py::arg("header_case_sensitive") = true, py::arg("cell_normalization") = "none",
        "Scores linearized predictions against linearized targets; returns the report as a dict.");
}
