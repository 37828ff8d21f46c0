#include <doctest.h>

#include <fstream>
#include <sstream>

#include "frob/cli.hpp"

using namespace frob;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("analyze on the P1 mirror") {
    CliResult r = run({"analyze", "-n", "1", "u1+u1^-1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("milnor number mu = 2") != std::string::npos);
    CHECK(r.out.find("subdiagram dimension nu = 1") != std::string::npos);
    CHECK(r.out.find("spectrum: 0 1") != std::string::npos);
}

TEST_CASE("analyze rejects non-convenient input with exit 3") {
    CliResult r = run({"analyze", "-n", "2", "u1+u2"});
    CHECK(r.code == 3);
    CHECK(r.err.find("not convenient") != std::string::npos);
}

TEST_CASE("parse errors exit with 2") {
    CliResult r = run({"analyze", "-n", "1", "u1^"});
    CHECK(r.code == 2);
    CHECK(r.err.find("offset 3") != std::string::npos);
}

TEST_CASE("json output is byte-stable and matches the golden files") {
    CliResult a1 = run({"analyze", "-n", "2", "u1+u2+u1^-1*u2^-1", "--json"});
    CliResult a2 = run({"analyze", "-n", "2", "u1+u2+u1^-1*u2^-1", "--json"});
    CHECK(a1.code == 0);
    CHECK(a1.out == a2.out);
    CHECK(a1.out == read_file(GOLDEN_DIR "/analyze_p2.json"));

    CliResult s1 = run({"structure", "-n", "1", "u1+u1^-1", "--deform", "good-max", "--json"});
    CliResult s2 = run({"structure", "-n", "1", "u1+u1^-1", "--deform", "good-max", "--json"});
    CHECK(s1.code == 0);
    CHECK(s1.out == s2.out);
    CHECK(s1.out == read_file(GOLDEN_DIR "/structure_p1.json"));

    CliResult p1 = run({"potential", "-n", "1", "u1+u1^-1", "--order", "4", "--json"});
    CHECK(p1.code == 0);
    CHECK(p1.out == read_file(GOLDEN_DIR "/potential_p1.json"));
}

TEST_CASE("structure prints the worked example") {
    CliResult r = run({"structure", "-n", "1", "u1+u1^-1", "--deform", "good-max"});
    CHECK(r.code == 0);
    CHECK(r.out.find("[x1, 2]") != std::string::npos);
    CHECK(r.out.find("[2, x1]") != std::string::npos);
    CHECK(r.out.find("structure relations: all pass") != std::string::npos);
}

TEST_CASE("explicit deformation lists") {
    CliResult r = run({"structure", "-n", "1", "u1^2+u1^-2", "--deform", "1;u1;u1^-1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("maximal=1") != std::string::npos);
    // non-subdiagram generator
    CliResult bad = run({"structure", "-n", "1", "u1+u1^-1", "--deform", "u1"});
    CHECK(bad.code == 3);
}

TEST_CASE("verify passes on the positive control") {
    CliResult r = run({"verify", "-n", "1", "u1+u1^-1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("OK") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("verify fails on a degenerate polynomial") {
    CliResult r = run({"verify", "-n", "2", "u1^2+2*u1*u2+u2^2+u1^-1*u2^-1"});
    CHECK(r.code == 4);
    CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("deform emits the extension matrices") {
    CliResult r = run({"deform", "-n", "1", "u1+u1^-1", "--order", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.find("extended relations: all pass") != std::string::npos);
}

TEST_CASE("spectrum subcommand") {
    CliResult r = run({"spectrum", "-n", "1", "u1^2+u1^-2"});
    CHECK(r.code == 0);
    CHECK(r.out == "spectrum: 0 1/2 1/2 1\n");
}

TEST_CASE("potential carries the curve-count coefficients") {
    CliResult r = run({"potential", "-n", "2", "u1+u2+u1^-1*u2^-1", "--order", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("1/120*t3^5") != std::string::npos); // N_2 / 5!
    CHECK(r.out.find("wdvv: pass") != std::string::npos);
}

TEST_CASE("verify handles polynomials with interior support") {
    CliResult r = run({"verify", "-n", "1", "u1^2+u1+u1^-1"});
    CHECK(r.code == 0);
}
