#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "johnwalk/io.hpp"

using namespace johnwalk;

namespace {

const std::string dir = std::string(TEST_WORKDIR) + "/cli_";

int run(const std::string& args, const std::string& log = "log.txt") {
    const std::string cmd = std::string(JOHNWALK_CLI) + " " + args + " > " + dir + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write(const std::string& name, const std::string& text) {
    const std::string path = dir + name;
    std::ofstream(path) << text;
    return path;
}

const std::string square = R"({"A": [[1, 0], [-1, 0], [0, 1], [0, -1]], "b": [1, 1, 1, 1]})";

} // namespace

TEST_CASE("sample writes samples and a manifest") {
    const std::string poly = write("square.json", square);
    REQUIRE(run("sample --polytope " + poly + " --steps 200 --seed 3 --output " + dir + "a.csv") == 0);
    const auto s = io::read_samples(dir + "a.csv");
    CHECK(s.size() == 201);
    CHECK(s[0].isZero(0.0));
    const auto m = io::read_manifest(dir + "a.csv.manifest.json");
    CHECK(m.steps == 200);
    CHECK(m.seed == 3);
    CHECK(m.walk == "john");

    REQUIRE(run("replay " + dir + "a.csv.manifest.json --output " + dir + "b.csv --manifest " + dir + "b.json") == 0);
    CHECK(io::read_file(dir + "a.csv") == io::read_file(dir + "b.csv"));

    for (const char* walk : {"ball", "hitrun"}) {
        REQUIRE(run("sample --polytope " + poly + " --walk " + walk + " --steps 100 --start 0.5,0.5 --output " + dir +
                    walk + ".csv") == 0);
        const auto w = io::read_samples(dir + walk + ".csv");
        CHECK(w.size() == 101);
        CHECK(w[0](0) == 0.5);
    }
}

TEST_CASE("other subcommands") {
    const std::string poly = write("square.json", square);
    CHECK(run("mve --polytope " + poly, "mve.txt") == 0);
    const std::string out = io::read_file(dir + "mve.txt");
    CHECK(out.find("logdet 0") != std::string::npos);
    CHECK(out.find("contacts 4") != std::string::npos);
    CHECK(run("diagnose --n-range 2:3 --trials 10", "diag.txt") == 0);
    CHECK(io::read_file(dir + "diag.txt").find("n3.det_dev_scaled") != std::string::npos);
    CHECK(run("bench --polytope " + poly + " --steps 300", "bench.txt") == 0);
    CHECK(io::read_file(dir + "bench.txt").find("hitrun.ess_per_second") != std::string::npos);
}

TEST_CASE("exit codes") {
    const std::string poly = write("square.json", square);
    CHECK(run("") != 0);
    CHECK(run("sample --steps 10") == 2);
    CHECK(run("sample --polytope " + write("bad.json", "{\"A\": [[1]], \"b\": [1, 2]}") + " --output " + dir +
              "x.csv") == 2);
    CHECK(io::read_file(dir + "log.txt").find("field b") != std::string::npos);
    CHECK(run("sample --polytope " + poly + " --walk dikin --output " + dir + "x.csv") == 2);
    CHECK(run("sample --polytope " + poly + " --start 1,0 --output " + dir + "x.csv") == 2);
    CHECK(run("sample --polytope " + poly + " --start 0 --output " + dir + "x.csv") == 2);
    const std::string half = write("half.json", R"({"A": [[1, 0]], "b": [1]})");
    CHECK(run("mve --polytope " + half + " --start 0,0") == 3);
    CHECK(run("diagnose --n-range 5:2") == 2);
}
