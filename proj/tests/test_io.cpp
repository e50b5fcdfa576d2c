#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "johnwalk/io.hpp"

using namespace johnwalk;
using namespace johnwalk::io;

namespace {

std::string message_of(const std::string& text) {
    try {
        parse_polytope(text, "p.json");
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("johnwalk_io_" + name)).string();
}

} // namespace

TEST_CASE("polytope parsing") {
    const Polytope I = parse_polytope(R"({"A": [[1], [-1]], "b": [1, 1]})");
    CHECK(I.dim() == 1);
    CHECK(I.rows() == 2);
    Vec x(1);
    x << 1.0;
    CHECK(contains(I, x));
    x << 1.01;
    CHECK(!contains(I, x));

    const Polytope H = parse_polytope(R"({"A": [[1, 0]], "b": [1]})");
    CHECK(H.rows() == 1);
    CHECK_THROWS_AS(chord(H, Vec::Zero(2), Vec::Unit(2, 1)), UnboundedError);

    CHECK(message_of(R"({"A": [[1], [-1]], "b": [1]})").find("field b has 1 entries") != std::string::npos);
    CHECK(message_of(R"({"A": [[1, 2], [3]], "b": [1, 1]})").find("A[1]") != std::string::npos);
    CHECK(message_of(R"({"A": [[1, "x"]], "b": [1]})").find("A[0][1]") != std::string::npos);
    CHECK(message_of(R"({"b": [1]})").find("missing field A") != std::string::npos);
    CHECK(message_of("{\"A\": [[1]],\n \"b\": [1,]}").find("p.json:2:") != std::string::npos);
    CHECK(message_of(R"({"A": [[1e999]], "b": [1]})") != "");
    CHECK(message_of(R"([1, 2])").find("top level") != std::string::npos);
    CHECK_THROWS_AS(load_polytope("/nonexistent/johnwalk.json"), InputError);
}

TEST_CASE("sample files") {
    std::ostringstream empty;
    write_samples(empty, std::vector<Vec>{}, 3);
    CHECK(empty.str() == "x1,x2,x3\n");

    Vec s(2);
    s << 0.5, -0.25;
    std::ostringstream one;
    write_samples(one, std::vector<Vec>{s}, 2);
    CHECK(one.str() == "x1,x2\n0.5,-0.25\n");

    std::vector<Vec> v;
    for (int k = 0; k < 50; ++k) {
        Vec z(3);
        z << std::sqrt(double(k)) / 7.0, -1.0 / (k + 3.0), 1e-300 * k;
        v.push_back(z);
    }
    const std::string path = temp_path("samples.csv");
    emit_samples(v, 3, path);
    const auto back = read_samples(path);
    REQUIRE(back.size() == v.size());
    for (size_t k = 0; k < v.size(); ++k) CHECK(back[k] == v[k]);
    std::remove(path.c_str());

    CHECK_THROWS_AS(write_samples(one, std::vector<Vec>{s}, 3), InputError);
    std::ofstream(path) << "x1,x2\n1,2\n3\n";
    CHECK_THROWS_AS(read_samples(path), InputError);
    std::remove(path.c_str());
}

TEST_CASE("manifest round trip") {
    RunManifest m;
    m.polytope_path = "cube.json";
    m.walk = "ball";
    m.steps = 1234;
    m.seed = 18446744073709551615ull;
    m.c = 0.1;
    m.lazy = false;
    m.solver = "vaidya";
    m.gap = 1e-7;
    m.delta = 0.3;
    m.start = std::vector<double>{0.1, -0.2};
    m.output_path = "out.csv";
    const std::string text = manifest_to_json(m);
    const RunManifest r = manifest_from_json(text);
    CHECK(r.polytope_path == m.polytope_path);
    CHECK(r.walk == m.walk);
    CHECK(r.steps == m.steps);
    CHECK(r.seed == m.seed);
    CHECK(r.c == m.c);
    CHECK(r.lazy == m.lazy);
    CHECK(r.solver == m.solver);
    CHECK(r.gap == m.gap);
    CHECK(r.delta == m.delta);
    CHECK(r.start == m.start);
    CHECK(r.output_path == m.output_path);
    CHECK(r.version == kVersion);
    CHECK(manifest_to_json(r) == text);

    const std::string path = temp_path("manifest.json");
    write_manifest(m, path);
    CHECK(read_file(path) == text);
    CHECK(manifest_to_json(read_manifest(path)) == text);
    std::remove(path.c_str());

    CHECK_THROWS_AS(manifest_from_json(R"({"steps": "many"})"), InputError);
    CHECK_THROWS_AS(manifest_from_json("[]"), InputError);
}
