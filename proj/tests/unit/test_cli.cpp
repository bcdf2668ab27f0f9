#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

#include "fixtures.hpp"
#include "multitab/dataset.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run cli(const std::string& args) {
    const std::string cmd = std::string(MULTITAB_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Workdir {
    fs::path path;
    Workdir() {
        path = fs::temp_directory_path() / ("multitab_cli_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~Workdir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string kRoots = " --db-root " + mt_test::source_path("data/databases").string() + " --catalog " +
                           mt_test::source_path("data/templates/catalog.json").string();

}  // namespace

TEST_CASE("exec prints the grouped average") {
    const std::string db = mt_test::source_path("data/databases/pets_1").string();
    auto r = cli("exec --db " + db + " --sql \"SELECT avg(weight), PetType FROM pets GROUP BY PetType\"");
    CHECK(r.code == 0);
    CHECK(r.out.find("12.0        | cat") != std::string::npos);
    CHECK(r.out.find("11.35       | dog") != std::string::npos);
    CHECK(r.out.find("(2 rows)") != std::string::npos);

    r = cli("exec --db " + db + " --format linearized --sql \"SELECT avg(weight), PetType FROM pets GROUP BY PetType\"");
    CHECK(r.out == "col : avg(weight) | PetType row 1 : 12.0 | cat row 2 : 11.35 | dog\n");

    r = cli("exec --db " + db + " --sql \"SELECT FROM pets\"");
    CHECK(r.code != 0);
    CHECK(r.out.find("parse error at offset 7") != std::string::npos);
}

TEST_CASE("generate, linearize, qc and eval compose") {
    Workdir w;
    auto r = cli("generate --count 40 --seed 5" + kRoots + " --out " + (w / "d.jsonl"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("generated: 40\n") != std::string::npos);
    CHECK(r.out.find("partial: no\n") != std::string::npos);
    CHECK(fs::exists(w / "d.jsonl.qc.json"));

    r = cli("linearize --in " + (w / "d.jsonl") + " --out " + (w / "lin"));
    REQUIRE(r.code == 0);
    const auto samples = multitab::read_dataset(fs::path(w / "d.jsonl"));
    const std::string target = slurp(w / "lin.target");
    const std::string source = slurp(w / "lin.source");
    CHECK(std::count(target.begin(), target.end(), '\n') == 40);
    CHECK(std::count(source.begin(), source.end(), '\n') == 40);
    CHECK(target.substr(0, target.find('\n')) == multitab::sample_target(samples[0]));

    r = cli("qc --in " + (w / "d.jsonl") + kRoots.substr(0, kRoots.find(" --catalog")) + " --out " + (w / "q.jsonl"));
    CHECK(r.code == 0);
    CHECK(r.out.find("kept: 40\n") != std::string::npos);
    CHECK(slurp(w / "q.jsonl") == slurp(w / "d.jsonl"));

    r = cli("eval --pred-file " + (w / "lin.target") + " --gold-file " + (w / "d.jsonl") + " --report " +
            (w / "e.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("100.00 |   100.00   100.00   100.00") != std::string::npos);
    CHECK(slurp(w / "e.json").find("\"table_em\": 1.0") != std::string::npos);

    std::ofstream(w / "short.txt") << "col : a row 1 : b\n";
    r = cli("eval --pred-file " + (w / "short.txt") + " --gold-file " + (w / "d.jsonl"));
    CHECK(r.code != 0);
    CHECK(r.out.find("1 prediction lines but 40 gold samples") != std::string::npos);
}

TEST_CASE("eval on the failure-case pair") {
    Workdir w;
    multitab::Sample s;
    s.id = "x";
    s.db_id = "pets_1";
    s.query = "SELECT avg(weight), PetType FROM pets GROUP BY PetType";
    s.table_names = {"pets"};
    s.tables = {mt_test::pets_table()};
    s.answer.schema.columns = {"avg(weight)", "PetType"};
    s.answer.rows = {{multitab::Value(12.0), multitab::Value("cat")}, {multitab::Value(11.35), multitab::Value("dog")}};
    multitab::write_dataset({s}, fs::path(w / "gold.jsonl"));
    std::ofstream(w / "pred.txt") << "col : PetType | avg(weight) row 1 : cat | 12.0 row 2 : dog | 13.4\n";
    auto r = cli("eval --pred-file " + (w / "pred.txt") + " --gold-file " + (w / "gold.jsonl"));
    CHECK(r.code == 0);
    CHECK(r.out.find("      0.00 |    50.00    50.00    50.00 |    50.00    50.00    50.00 |    75.00    75.00    75.00") !=
          std::string::npos);
}

TEST_CASE("generate is byte-identical across runs and worker counts") {
    Workdir w;
    REQUIRE(cli("generate --count 150 --seed 11 --workers 1" + kRoots + " --out " + (w / "a.jsonl")).code == 0);
    REQUIRE(cli("generate --count 150 --seed 11 --workers 1" + kRoots + " --out " + (w / "b.jsonl")).code == 0);
    REQUIRE(cli("generate --count 150 --seed 11 --workers 8" + kRoots + " --out " + (w / "c.jsonl")).code == 0);
    CHECK(slurp(w / "a.jsonl") == slurp(w / "b.jsonl"));
    CHECK(slurp(w / "a.jsonl") == slurp(w / "c.jsonl"));
    REQUIRE(cli("generate --count 150 --seed 12" + kRoots + " --out " + (w / "d.jsonl")).code == 0);
    CHECK(slurp(w / "a.jsonl") != slurp(w / "d.jsonl"));
}

TEST_CASE("generate with an all-join mix") {
    Workdir w;
    auto r = cli("generate --count 20 --mix join=1" + kRoots + " --out " + (w / "j.jsonl"));
    CHECK(r.code == 0);
    CHECK(r.out.find("category join: 20 (100.00%)") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(cli("").code == 2);
    CHECK(cli("generate --bogus 1 --out x").code == 2);
    CHECK(cli("eval --pred-file nothing-here --gold-file nothing-here").code == 2);
    auto r = cli("generate --count 5 --mix single=0.5" + kRoots + " --out /dev/null");
    CHECK(r.code == 1);
    CHECK(r.out.find("error:") != std::string::npos);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("repair subcommand") {
    Workdir w;
    std::ofstream(w / "q.sql") << "SELECT max(c) WHERE c > 3\nSELECT a FROM t\n";
    auto r = cli("repair --in " + (w / "q.sql"));
    CHECK(r.code == 0);
    CHECK(r.out.find("SELECT max(c) FROM w WHERE c > 3\nSELECT a FROM t\n") != std::string::npos);
}
