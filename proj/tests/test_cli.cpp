#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string binary_path() {
    const char* env = std::getenv("MRHAM_BIN");
    REQUIRE(env != nullptr);
    return env;
}

std::string data_dir() {
    const char* env = std::getenv("MRHAM_DATA");
    REQUIRE(env != nullptr);
    return env;
}

int run_cli(const std::string& args) {
    const std::string cmd = binary_path() + " " + args + " > cli_scratch/stdout.txt 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return (status >> 8) & 0xff;
}

std::string slurp(const std::string& path) {
    std::ifstream file(path);
    REQUIRE(file.good());
    std::ostringstream out;
    out << file.rdbuf();
    return out.str();
}

std::size_t line_count(const std::string& path) {
    const auto text = slurp(path);
    std::size_t n = 0;
    for (char c : text)
        n += (c == '\n');
    return n;
}

struct Scratch {
    Scratch() {
        fs::remove_all("cli_scratch");
        fs::create_directories("cli_scratch");
    }
};

}  // namespace

TEST_CASE("generate produces the full experiment file set") {
    Scratch scratch;
    const auto model = data_dir() + "/single_magnet.json";
    REQUIRE(run_cli("generate --model " + model + " --out cli_scratch/gen --hold 2") == 0);

    // 21 levels held 2 s at 1 ms sampling.
    CHECK(line_count("cli_scratch/gen/input.csv") == 42001);
    CHECK(line_count("cli_scratch/gen/response.csv") == 42001);
    CHECK(slurp("cli_scratch/gen/input.csv").substr(0, 8) == "t,value\n");
    CHECK(slurp("cli_scratch/gen/static.csv").substr(0, 4) == "U,Y\n");
    CHECK(line_count("cli_scratch/gen/static.csv") == 22);
    CHECK(fs::exists("cli_scratch/gen/records.json"));
    CHECK(fs::exists("cli_scratch/gen/static_extracted.csv"));
    CHECK(fs::exists("cli_scratch/gen/input.csv.meta.json"));
    CHECK(slurp("cli_scratch/gen/input.csv.meta.json").find("\"unit\": \"V\"") !=
          std::string::npos);
}

TEST_CASE("generate plus identify round-trips through files deterministically") {
    Scratch scratch;
    const auto model = data_dir() + "/single_magnet.json";
    for (const char* run : {"a", "b"}) {
        const std::string dir = std::string("cli_scratch/") + run;
        REQUIRE(run_cli("generate --model " + model + " --out " + dir +
                        " --hold 20 --sigma 0.002 --seed 42") == 0);
        REQUIRE(run_cli("identify --records " + dir + "/records.json --statics " + dir +
                        "/static.csv --out " + dir) == 0);
    }
    CHECK(slurp("cli_scratch/a/model.json") == slurp("cli_scratch/b/model.json"));
    CHECK(slurp("cli_scratch/a/diagnostics.json") == slurp("cli_scratch/b/diagnostics.json"));
    CHECK(slurp("cli_scratch/a/reports.json") == slurp("cli_scratch/b/reports.json"));
    CHECK(slurp("cli_scratch/a/response.csv") == slurp("cli_scratch/b/response.csv"));
    CHECK(fs::exists("cli_scratch/a/overlay_00.csv"));
    CHECK(slurp("cli_scratch/a/overlay_00.csv").substr(0, 37) ==
          "t,measured,fitted_fast,fitted_slow\n0,");
}

TEST_CASE("validate scores a model against its own simulation as perfect") {
    Scratch scratch;
    const auto model = data_dir() + "/double_magnet.json";
    REQUIRE(run_cli("generate --model " + model + " --out cli_scratch/gen --hold 2") == 0);
    REQUIRE(run_cli("validate --model " + model + " --input cli_scratch/gen/input.csv"
                    " --measured cli_scratch/gen/response.csv --out cli_scratch/val") == 0);
    const auto report = slurp("cli_scratch/val/report.json");
    CHECK(report.find("\"fit_percent\": 100.0") != std::string::npos);
    CHECK(slurp("cli_scratch/val/overlay.csv").substr(0, 22) == "t,measured,predicted\n0");
}

TEST_CASE("bode emits 400 log-spaced rows with unit DC gain") {
    Scratch scratch;
    const auto model = data_dir() + "/single_magnet.json";
    REQUIRE(run_cli("bode --model " + model + " --out cli_scratch/bode") == 0);
    CHECK(line_count("cli_scratch/bode/bode.csv") == 401);

    std::ifstream file("cli_scratch/bode/bode.csv");
    std::string header, first;
    std::getline(file, header);
    std::getline(file, first);
    CHECK(header == "omega,mag_fast,phase_fast,mag_slow,phase_slow,mag_total,phase_total");
    // First row: omega = 1e-3, where the total response must sit at its DC
    // gain of one.
    std::istringstream row(first);
    std::string field;
    std::getline(row, field, ',');
    CHECK(field == "0.001");
    for (int i = 0; i < 5; ++i)
        std::getline(row, field, ',');
    CHECK(std::abs(std::stod(field) - 1.0) < 1e-3);
}

TEST_CASE("config file supplies flags and explicit flags override it") {
    Scratch scratch;
    const auto model = data_dir() + "/single_magnet.json";
    {
        std::ofstream cfg("cli_scratch/run.json");
        cfg << "{\"model\": \"" << model << "\", \"out\": \"cli_scratch/cfg\", \"hold\": 2.0}\n";
    }
    REQUIRE(run_cli("generate --config cli_scratch/run.json") == 0);
    CHECK(line_count("cli_scratch/cfg/input.csv") == 42001);

    REQUIRE(run_cli("generate --config cli_scratch/run.json --hold 1 --out cli_scratch/cfg2") ==
            0);
    CHECK(line_count("cli_scratch/cfg2/input.csv") == 21001);
}

TEST_CASE("failure modes map to distinct exit codes") {
    Scratch scratch;
    const auto model = data_dir() + "/single_magnet.json";

    SECTION("missing files and bad values exit 1") {
        CHECK(run_cli("generate --model cli_scratch/nope.json --out cli_scratch/x") == 1);
        CHECK(run_cli("generate --model " + model + " --out cli_scratch/x --hold 0") == 1);
        CHECK(run_cli("identify --records cli_scratch/nope.json --statics cli_scratch/nope.csv"
                      " --out cli_scratch/x") == 1);
        CHECK(run_cli("validate --model " + model + " --out cli_scratch/x") == 1);
        CHECK(run_cli("definitely-not-a-subcommand") == 1);
    }

    SECTION("too few usable records exit 2") {
        std::ofstream records("cli_scratch/two.json");
        records << R"([{"u_pre":0,"u_post":6,"sample_period":0.001,"delta_y":[0,0.1,0.15]},
                       {"u_pre":6,"u_post":0,"sample_period":0.001,"delta_y":[0,-0.1,-0.15]}])";
        records.close();
        std::ofstream statics("cli_scratch/static.csv");
        statics << "U,Y\n0,7\n6,6.8\n12,6.4\n";
        statics.close();
        CHECK(run_cli("identify --records cli_scratch/two.json --statics cli_scratch/static.csv"
                      " --out cli_scratch/x") == 2);
    }

    SECTION("mismatched validation grids exit 3") {
        REQUIRE(run_cli("generate --model " + model + " --out cli_scratch/g1 --hold 2") == 0);
        REQUIRE(run_cli("generate --model " + model +
                        " --out cli_scratch/g2 --hold 2 --sample-period 0.002") == 0);
        CHECK(run_cli("validate --model " + model + " --input cli_scratch/g1/input.csv"
                      " --measured cli_scratch/g2/response.csv --out cli_scratch/x") == 3);
    }
}
