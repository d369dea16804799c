// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "frl/io.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status = -1;
    std::string output;
};

RunResult run(const std::string& cmd) {
    RunResult r;
    FILE* p = popen((cmd + " 2>&1").c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p) != nullptr) r.output += buf;
    const int rc = pclose(p);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

std::string binary() {
    const char* b = std::getenv("FRL_BIN");
    REQUIRE(b != nullptr);
    return b;
}

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / "frl_cli_test";
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("bad invocations exit with a usage error") {
    CHECK(run(binary()).status == 1);
    CHECK(run(binary() + " sample --no-such-flag 3").status == 1);
    CHECK(run(binary() + " verify no_such_experiment").status == 1);
    const RunResult r = run(binary() + " frobnicate");
    CHECK(r.status == 1);
}

TEST_CASE("positive definiteness verdict across the Hurst range") {
    const RunResult r =
        run(binary() + " verify pd --T 1 --N 16 --H 0.2,0.5,0.7");
    CHECK(r.status == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
}

TEST_CASE("sample writes a tagged binary artifact") {
    Scratch tmp;
    const std::string f = tmp.file("paths.frlp");
    const RunResult r = run(binary() +
                            " sample --geometry circle --T 1 --H 0.25 --d 2"
                            " --N 16 --n 4 --seed 7 --out " + f);
    CHECK(r.status == 0);
    const std::string raw = slurp(f);
    REQUIRE(raw.size() > 4);
    CHECK(raw.compare(0, 4, "FRLP") == 0);
}

TEST_CASE("sample then loctime forms a pipeline") {
    Scratch tmp;
    const std::string f = tmp.file("paths.frlp");
    REQUIRE(run(binary() +
                " sample --geometry circle --T 1 --H 0.25 --d 2 --N 32"
                " --n 50 --seed 3 --out " + f).status == 0);
    const RunResult r = run(binary() + " loctime --in " + f + " --eps 0.02");
    CHECK(r.status == 0);
    const nlohmann::json j = nlohmann::json::parse(r.output);
    CHECK(j.at("estimate").at("quantity") == "local_time");
    CHECK(j.at("estimate").at("n_samples") == 50);
    CHECK(j.at("estimate").at("mean").get<double>() > 0.0);
    CHECK(j.contains("config"));  // every artifact echoes its resolved config
}

TEST_CASE("csv artifacts carry a config comment and feed back in") {
    Scratch tmp;
    const std::string f = tmp.file("paths.csv");
    REQUIRE(run(binary() +
                " sample --geometry circle --T 1 --H 0.25 --d 2 --N 16"
                " --n 5 --seed 9 --format csv --out " + f).status == 0);
    const std::string raw = slurp(f);
    CHECK(raw.rfind("# ", 0) == 0);
    CHECK(raw.find("sample_id,branch,t,x_1,x_2") != std::string::npos);
    const RunResult r = run(binary() + " loctime --in " + f +
                            " --geometry circle --T 1 --H 0.25 --d 2 --N 16"
                            " --eps 0.05");
    CHECK(r.status == 0);
    const nlohmann::json j = nlohmann::json::parse(r.output);
    CHECK(j.at("estimate").at("n_samples") == 5);
}

TEST_CASE("config file merges under explicit flags") {
    Scratch tmp;
    const std::string cfg = tmp.file("run.json");
    {
        std::ofstream out(cfg);
        out << "{\"H\": 0.3, \"n\": 5}\n";
    }
    const std::string f = tmp.file("merged.frlp");
    const RunResult r = run(binary() + " sample --config " + cfg +
                            " --geometry circle --T 1 --d 2 --N 16 --seed 2"
                            " --n 7 --out " + f);
    CHECK(r.status == 0);
    const frl::PathEnsemble e = frl::load_ensemble(f);
    CHECK(e.n_samples() == 7);        // flag wins over the config file
    CHECK(e.spec().hurst == 0.3);     // config fills what flags left unset
    CHECK(run(binary() + " sample --config " + tmp.file("missing.json") +
              " --out " + f).status == 1);
    const std::string bad = tmp.file("bad.json");
    {
        std::ofstream out(bad);
        out << "{\"no_such_key\": 1}\n";
    }
    CHECK(run(binary() + " sample --config " + bad + " --out " + f).status == 1);
}

TEST_CASE("thread count never changes an estimate") {
    Scratch tmp;
    const std::string f = tmp.file("paths.frlp");
    REQUIRE(run(binary() +
                " sample --geometry circle --T 1 --H 0.25 --d 2 --N 32"
                " --n 40 --seed 12 --out " + f).status == 0);
    const RunResult one = run(binary() + " loctime --in " + f +
                              " --eps 0.02 --threads 1");
    const RunResult four = run(binary() + " loctime --in " + f +
                               " --eps 0.02 --threads 4");
    REQUIRE(one.status == 0);
    REQUIRE(four.status == 0);
    const double m1 =
        nlohmann::json::parse(one.output).at("estimate").at("mean").get<double>();
    const double m4 =
        nlohmann::json::parse(four.output).at("estimate").at("mean").get<double>();
    CHECK(m1 == m4);
}

TEST_CASE("thread environment default is validated") {
    Scratch tmp;
    const std::string f = tmp.file("paths.frlp");
    const RunResult r = run("FRL_THREADS=abc " + binary() +
                            " sample --geometry circle --T 1 --H 0.25 --d 2"
                            " --N 16 --n 2 --seed 1 --out " + f);
    CHECK(r.status == 1);
    const RunResult ok = run("FRL_THREADS=2 " + binary() +
                             " sample --geometry circle --T 1 --H 0.25 --d 2"
                             " --N 16 --n 2 --seed 1 --out " + f);
    CHECK(ok.status == 0);
}

TEST_CASE("format errors surface as validation failures") {
    Scratch tmp;
    const std::string f = tmp.file("paths.frlp");
    REQUIRE(run(binary() +
                " sample --geometry circle --T 1 --H 0.25 --d 2 --N 16"
                " --n 3 --seed 5 --out " + f).status == 0);
    const std::string raw = slurp(f);
    const std::string cut = tmp.file("cut.frlp");
    {
        std::ofstream out(cut, std::ios::binary);
        out << raw.substr(0, raw.size() - 10);
    }
    CHECK(run(binary() + " loctime --in " + cut + " --eps 0.02").status == 1);
}

TEST_CASE("numeric failures use their own exit code") {
    Scratch tmp;
    const std::string f = tmp.file("paths.frlp");
    REQUIRE(run(binary() +
                " sample --geometry circle --T 1 --H 0.25 --d 2 --N 32"
                " --n 30 --seed 8 --out " + f).status == 0);
    const RunResult r = run(binary() + " edwards --in " + f +
                            " --eps 0.02 --centered --g 1e9");
    CHECK(r.status == 2);
    CHECK(r.output.find("numeric error") != std::string::npos);
}

TEST_CASE("failed verification verdicts use their own exit code") {
    // a 8-point grid cannot reach the continuum value within 5 percent
    const RunResult r =
        run(binary() + " verify meanlt --H 0.25 --d 2 --T 1 --N 8 --n 50");
    CHECK(r.status == 3);
    CHECK(r.output.find("FAIL") != std::string::npos);
}
