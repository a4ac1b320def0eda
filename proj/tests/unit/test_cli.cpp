#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "acdma/numerics.hpp"
#include "app.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "acdma");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = acdma::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> rows(const std::string& text)
{
    std::vector<std::vector<std::string>> table;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream cs(line);
        std::string cell;
        while (std::getline(cs, cell, ',')) {
            cells.push_back(cell);
        }
        table.push_back(cells);
    }
    return table;
}

std::string header(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            return line;
        }
    }
    return {};
}

double num(const std::string& s) { return std::stod(s); }

} // namespace

TEST_CASE("montecarlo output is reproducible for a seed")
{
    const std::vector<std::string> args{"montecarlo", "--N", "16", "--K", "8", "--trials", "3", "--grid", "64"};
    auto with_seed = [&](const std::string& seed) {
        auto a = args;
        a.insert(a.end(), {"--seed", seed});
        return invoke(a);
    };
    const Result a = with_seed("5");
    const Result b = with_seed("5");
    const Result c = with_seed("6");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(header(a.out) == "trial,user,delay_over_tc,power,sinr,efficiency,predicted_efficiency");
    const auto ra = rows(a.out);
    const auto rc = rows(c.out);
    REQUIRE(ra.size() == 24);
    REQUIRE(rc.size() == 24);
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i][6] == rc[i][6]);
    }
}

TEST_CASE("montecarlo writes to a file")
{
    const std::string path = std::string(ACDMA_TEST_TMPDIR) + "/mc.csv";
    const Result r = invoke({"montecarlo", "--N", "16", "--K", "4", "--trials", "2", "--grid", "64", "--out", path});
    REQUIRE(r.code == 0);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(rows(ss.str()).size() == 8);
    std::filesystem::remove(path);
}

TEST_CASE("efficiency at zero load is one")
{
    const Result r = invoke({"efficiency", "--beta", "0", "--grid", "32"});
    REQUIRE(r.code == 0);
    CHECK(header(r.out) == "beta,omega,density,eta");
    for (const auto& row : rows(r.out)) {
        CHECK_THAT(num(row[3]), Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("Nyquist sinc efficiency equals the synchronous baseline")
{
    const Result a = invoke({"efficiency", "--beta", "0.5,1,2", "--waveform", "sinc:1", "--r", "1", "--grid", "32"});
    const Result b = invoke({"efficiency", "--beta", "0.5,1,2", "--waveform", "sinc:1", "--r", "1", "--grid", "32",
                             "--sync-baseline"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const auto ra = rows(a.out);
    const auto rb = rows(b.out);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i][0] == rb[i][0]);
        CHECK_THAT(num(ra[i][3]), Catch::Matchers::WithinRel(num(rb[i][3]), 1e-12));
    }
}

TEST_CASE("efficiency cross-check between solvers")
{
    const Result r = invoke({"efficiency", "--beta", "1", "--delays", "uniform:16", "--grid", "128", "--cross-check"});
    REQUIRE(r.code == 0);
    CHECK(header(r.out) == "beta,omega,density,eta,eta_matrix");
    const auto t = rows(r.out);
    REQUIRE(!t.empty());
    CHECK_THAT(num(t[0][4]), Catch::Matchers::WithinRel(num(t[0][3]), 1e-3));
}

TEST_CASE("matrix solver handles arbitrary delays")
{
    const Result r = invoke({"efficiency", "--beta", "1", "--delays", "point:0.3", "--solver", "matrix", "--grid", "64"});
    REQUIRE(r.code == 0);
    CHECK(header(r.out) == "beta,delay_over_tc,power,sinr,efficiency,eta");
    const auto t = rows(r.out);
    REQUIRE(t.size() == 1);
    CHECK(num(t[0][4]) > 0.0);
    CHECK(num(t[0][4]) < 1.0);
}

TEST_CASE("capacity command")
{
    const Result r = invoke({"capacity", "--beta", "1", "--waveform", "sinc:1", "--r", "1", "--delays", "uniform:4"});
    REQUIRE(r.code == 0);
    const auto t = rows(r.out);
    REQUIRE(t.size() == 1);
    CHECK_THAT(num(t[0][2]), Catch::Matchers::WithinRel(num(t[0][3]), 1e-6));
}

TEST_CASE("figure2 command")
{
    const Result r = invoke({"figure2", "--alpha", "0.5:2:0.5"});
    REQUIRE(r.code == 0);
    CHECK(header(r.out) == "alpha,gamma_async_sinc,gamma_sync");
    const auto t = rows(r.out);
    REQUIRE(t.size() == 4);
    CHECK_THAT(num(t[1][1]), Catch::Matchers::WithinRel(num(t[1][2]), 1e-6));
    for (std::size_t i = 1; i < t.size(); ++i) {
        CHECK(num(t[i][1]) < num(t[i - 1][1]));
    }
    CHECK(num(t[3][1]) > num(t[3][2]));
}

TEST_CASE("figure3 command")
{
    const Result r = invoke({"figure3", "--beta", "0.5,2,8", "--delays", "uniform:16"});
    REQUIRE(r.code == 0);
    CHECK(header(r.out) == "beta,gamma_async,gamma_sync,relative_gap");
    const auto t = rows(r.out);
    REQUIRE(t.size() == 3);
    CHECK(num(t[0][3]) <= num(t[1][3]));
    CHECK(num(t[1][3]) <= num(t[2][3]));
}

TEST_CASE("theorem3 command")
{
    const Result r = invoke({"theorem3", "--N", "16", "--K", "4", "--trials", "2", "--window", "2"});
    REQUIRE(r.code == 0);
    CHECK(header(r.out) == "trial,user,delay_over_tc,sinr_general,sinr_reduced,efficiency_general,efficiency_reduced");
    CHECK(rows(r.out).size() == 8);
}

TEST_CASE("verify passes and detects a perturbation")
{
    const Result ok = invoke({"verify"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    const Result bad = invoke({"verify", "--perturb-qbar", "1e-3"});
    CHECK(bad.code == acdma::cli::exit_failed_property);
    CHECK(bad.out.find("lemma1_trace_vanishes,FAIL") != std::string::npos);
}

TEST_CASE("configuration dump round trips through a file")
{
    const Result dumped = invoke({"efficiency", "--beta", "0.5,1", "--n0", "0.2", "--seed", "9", "--dump-config"});
    REQUIRE(dumped.code == 0);
    const std::string path = std::string(ACDMA_TEST_TMPDIR) + "/roundtrip.conf";
    {
        std::ofstream f(path);
        f << "# saved\n" << dumped.out;
    }
    const Result again = invoke({"efficiency", "--config", path, "--dump-config"});
    REQUIRE(again.code == 0);
    CHECK(again.out == dumped.out);
    std::filesystem::remove(path);
}

TEST_CASE("Eb/N0 in dB is echoed exactly")
{
    const Result r = invoke({"figure3", "--ebn0-db", "7.5", "--dump-config"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("ebn0_db = 7.5\n") != std::string::npos);
    CHECK_THAT(acdma::to_db(acdma::from_db(7.5)), Catch::Matchers::WithinAbs(7.5, 1e-12));
}

TEST_CASE("invalid input exits with code 2")
{
    CHECK(invoke({"efficiency", "--delays", "point:0.3"}).code == acdma::cli::exit_invalid);
    CHECK(invoke({"efficiency", "--bogus"}).code == acdma::cli::exit_invalid);
    CHECK(invoke({"efficiency", "--waveform", "gauss:1"}).code == acdma::cli::exit_invalid);
    CHECK(invoke({"efficiency", "--waveform", "rrc:0.22", "--r", "1"}).code == acdma::cli::exit_invalid);
    CHECK(invoke({"efficiency", "--grid", "7"}).code == acdma::cli::exit_invalid);
    CHECK(invoke({}).code == acdma::cli::exit_invalid);
}
