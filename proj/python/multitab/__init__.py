"""Python bindings for the multitab C++ toolkit."""

from ._core import (  # noqa: F401
    CatalogError,
    Database,
    DatasetError,
    ExecError,
    FormatError,
    LoadError,
    ParseError,
    build_model_input,
    canonical_cell_text,
    check_sample,
    database_from_tables,
    evaluate,
    execute,
    generate,
    load_database,
    normalize_sql,
    parse_answer_table,
    read_dataset,
    repair_from_clause,
    run_qc,
    sample_source,
    sample_target,
    serialize_answer_table,
    serialize_input_table,
    table_names,
    write_dataset,
)

__version__ = "0.1.0"
