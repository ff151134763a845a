#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "ueda/cli.hpp"

using namespace ueda;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ueda_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

const char* kGoldenTuple = R"({"genus": 1, "bundles": [{"angles": [0.6180339887498949, 0.0]}]})";
const char* kTorsionTuple = R"({"genus": 1, "bundles": [{"angles": ["1/2", "0/1"]}]})";

} // namespace

TEST_CASE("classify subcommand: exit codes, reports, determinism") {
    TempDir tmp;
    spit(tmp.file("golden.json"), kGoldenTuple);
    RunConfig cfg;
    cfg.subcommand = "classify";
    cfg.input_path = tmp.file("golden.json");
    cfg.out_path = tmp.file("golden_report.json");
    cfg.scan_bound = 60;
    cfg.threads = 1;

    SECTION("a Diophantine tuple exits 0 with an S_A verdict") {
        REQUIRE(run(cfg) == 0);
        auto rep = json::parse(slurp(cfg.out_path));
        CHECK(rep["verdict"] == "S_A");
        CHECK(rep["A"].get<double>() <= 2.0);
        CHECK(rep["siegel"]["property_a"] == true);
        CHECK(rep["siegel"]["property_b"] == true);
        CHECK(rep.contains("config_hash"));
        CHECK(rep["version"] == kVersion);
        std::string csv = slurp(tmp.file("golden_report.csv"));
        CHECK(csv.find("n,alpha,distance,bound,pass") != std::string::npos);
        CHECK(csv.find("# version=") != std::string::npos);
    }
    SECTION("identical runs at different thread counts are byte-identical") {
        REQUIRE(run(cfg) == 0);
        std::string j1 = slurp(cfg.out_path);
        std::string c1 = slurp(tmp.file("golden_report.csv"));
        cfg.threads = 4;
        REQUIRE(run(cfg) == 0);
        CHECK(slurp(cfg.out_path) == j1);
        CHECK(slurp(tmp.file("golden_report.csv")) == c1);
    }
    SECTION("torsion angles exit 2 as E0 with property (a) failure noted") {
        spit(tmp.file("torsion.json"), kTorsionTuple);
        cfg.input_path = tmp.file("torsion.json");
        cfg.out_path = tmp.file("torsion_report.json");
        cfg.mode = "exact";
        REQUIRE(run(cfg) == 2);
        auto rep = json::parse(slurp(cfg.out_path));
        CHECK(rep["verdict"] == "E0");
        CHECK(rep["torsion_order"] == 2);
        CHECK(rep["siegel"]["property_a"] == false);
    }
}

TEST_CASE("example subcommand mirrors the mathematical outcome in its exit code") {
    TempDir tmp;
    RunConfig cfg;
    cfg.subcommand = "example";
    cfg.out_path = tmp.file("out.json");
    cfg.N = 6;
    cfg.N_given = true;

    SECTION("deformation_trivial: exit 0, infinite type") {
        cfg.example_name = "deformation_trivial";
        REQUIRE(run(cfg) == 0);
        auto rep = json::parse(slurp(cfg.out_path));
        CHECK(rep["finite_type"] == false);
        CHECK(rep["type"] == "infinity(N=6)");
    }
    SECTION("resonant_demo: exit 2, type 1 in the report") {
        cfg.example_name = "resonant_demo";
        REQUIRE(run(cfg) == 2);
        auto rep = json::parse(slurp(cfg.out_path));
        CHECK(rep["finite_type"] == true);
        CHECK(rep["type_level"] == 1);
        CHECK(rep["obstruction"]["level"] == 1);
    }
    SECTION("projective_bundle with extension data from the input file") {
        cfg.example_name = "projective_bundle";
        spit(tmp.file("ext.json"), R"({"r": 2, "extension": [[0.5, 0.0], [0.0, 0.0]]})");
        cfg.input_path = tmp.file("ext.json");
        REQUIRE(run(cfg) == 2);
        auto rep = json::parse(slurp(cfg.out_path));
        CHECK(rep["type_level"] == 1);
    }
}

TEST_CASE("normalize subcommand") {
    TempDir tmp;
    ExampleParams p;
    p.N = 8;
    p.seed = 5;
    auto sys = generate_example("random_diophantine", p);
    spit(tmp.file("germ.json"), germ_to_json(sys).dump());

    RunConfig cfg;
    cfg.subcommand = "normalize";
    cfg.input_path = tmp.file("germ.json");
    cfg.out_path = tmp.file("norm.json");
    REQUIRE(run(cfg) == 0);
    auto rep = json::parse(slurp(cfg.out_path));
    CHECK(rep["finite_type"] == false);
    CHECK(rep["residual_ok"] == true);
    CHECK(rep["divisor_log"].size() == 7);

    SECTION("malformed JSON exits 1 with a parse diagnostic") {
        spit(tmp.file("bad.json"), "{\"r\": 2, ");
        cfg.input_path = tmp.file("bad.json");
        CHECK(run(cfg) == 1);
    }
    SECTION("unknown subcommands exit 1") {
        cfg.subcommand = "frobnicate";
        CHECK(run(cfg) == 1);
    }
}

TEST_CASE("majorant subcommand") {
    TempDir tmp;
    RunConfig cfg;
    cfg.subcommand = "majorant";
    cfg.out_path = tmp.file("maj.json");
    cfg.N = 8;
    cfg.N_given = true;

    SECTION("plain run emits the series, the cross-check and the CSV") {
        spit(tmp.file("p.json"), R"({"K": 1.0, "M": 1.0, "R": 1.0, "r": 2})");
        cfg.input_path = tmp.file("p.json");
        REQUIRE(run(cfg) == 0);
        auto rep = json::parse(slurp(cfg.out_path));
        CHECK(rep["cross_check_max_rel_dev"].get<double>() < 1e-10);
        CHECK(rep["A"].size() > 0);
        CHECK(rep["radius_estimate"].get<double>() > 0.0);
        std::string csv = slurp(tmp.file("maj.csv"));
        CHECK(csv.find("n,B_n,B_hat_n,ratio") != std::string::npos);
    }
    SECTION("a torsion weight exits 2 with the failing index") {
        spit(tmp.file("t.json"),
             R"({"K": 1.0, "M": 1.0, "R": 1.0, "r": 1, "eps_inv": [1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0]})");
        cfg.input_path = tmp.file("t.json");
        REQUIRE(run(cfg) == 2);
        auto rep = json::parse(slurp(cfg.out_path));
        CHECK(rep["torsion_index"] == 3);
    }
}

TEST_CASE("scan subcommand aggregates deterministic CSV") {
    TempDir tmp;
    spit(tmp.file("grid.json"),
         R"({"task": "majorant", "K": [0.5, 1.0], "M": [1.0], "R": [0.5, 1.0], "r": [1, 2], "N": 6})");
    RunConfig cfg;
    cfg.subcommand = "scan";
    cfg.input_path = tmp.file("grid.json");
    cfg.out_path = tmp.file("scan.csv");
    cfg.threads = 3;
    REQUIRE(run(cfg) == 0);
    std::string csv = slurp(cfg.out_path);
    int rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 3 + 1 + 8);  // 3 comment lines, header, 2*1*2*2 grid points

    cfg.threads = 1;
    std::string first = csv;
    REQUIRE(run(cfg) == 0);
    CHECK(slurp(cfg.out_path) == first);
}
