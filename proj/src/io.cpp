#include "johnwalk/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace johnwalk::io {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line and column.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                         e.what() + ")");
    } catch (const json::exception& e) {
        throw InputError(source + ": malformed JSON (" + e.what() + ")");
    }
}

double number_at(const json& v, const std::string& where) {
    if (!v.is_number()) throw InputError(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(where + ": non-finite value");
    return x;
}

} // namespace

Polytope parse_polytope(const std::string& text, const std::string& source) {
    const json j = parse_json(text, source);
    if (!j.is_object()) throw InputError(source + ": top level must be an object with fields A and b");
    if (!j.contains("A")) throw InputError(source + ": missing field A");
    if (!j.contains("b")) throw InputError(source + ": missing field b");
    const json& jA = j["A"];
    const json& jb = j["b"];
    if (!jA.is_array() || jA.empty()) throw InputError(source + ": field A must be a non-empty array of rows");
    if (!jb.is_array()) throw InputError(source + ": field b must be an array");

    const std::size_t m = jA.size();
    if (!jA[0].is_array() || jA[0].empty()) throw InputError(source + ": A[0] must be a non-empty array");
    const std::size_t n = jA[0].size();
    Mat A(static_cast<Index>(m), static_cast<Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
        const std::string row = source + ": A[" + std::to_string(i) + "]";
        if (!jA[i].is_array()) throw InputError(row + ": expected an array");
        if (jA[i].size() != n) {
            throw InputError(row + ": has " + std::to_string(jA[i].size()) + " entries, expected " + std::to_string(n));
        }
        for (std::size_t k = 0; k < n; ++k) {
            A(Index(i), Index(k)) = number_at(jA[i][k], row + "[" + std::to_string(k) + "]");
        }
    }
    if (jb.size() != m) {
        throw InputError(source + ": field b has " + std::to_string(jb.size()) + " entries but A has " +
                         std::to_string(m) + " rows");
    }
    Vec b(static_cast<Index>(m));
    for (std::size_t i = 0; i < m; ++i) b(Index(i)) = number_at(jb[i], source + ": b[" + std::to_string(i) + "]");
    try {
        return Polytope(std::move(A), std::move(b));
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
}

Polytope load_polytope(const std::string& path) { return parse_polytope(read_file(path), path); }

void write_samples(std::ostream& os, std::span<const Vec> samples, Index n) {
    for (Index k = 0; k < n; ++k) os << (k ? "," : "") << 'x' << (k + 1);
    os << '\n';
    char buf[40];
    for (const Vec& s : samples) {
        if (s.size() != n) throw InputError("write_samples: sample has the wrong dimension");
        for (Index k = 0; k < n; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", s(k));
            if (k) os << ',';
            os << buf;
        }
        os << '\n';
    }
}

void emit_samples(std::span<const Vec> samples, Index n, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    write_samples(out, samples, n);
    out.flush();
    if (!out) throw InputError("write failed for '" + path + "'");
}

std::vector<Vec> read_samples(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty sample file");
    const Index n = Index(std::count(line.begin(), line.end(), ',')) + 1;
    std::vector<Vec> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Vec v(n);
        std::istringstream row(line);
        std::string cell;
        Index k = 0;
        while (std::getline(row, cell, ',')) {
            if (k >= n) throw InputError(path + ":" + std::to_string(lineno) + ": too many columns");
            char* end = nullptr;
            v(k) = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw InputError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
            ++k;
        }
        if (k != n) throw InputError(path + ":" + std::to_string(lineno) + ": too few columns");
        out.push_back(std::move(v));
    }
    return out;
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["polytope_path"] = m.polytope_path;
    j["walk"] = m.walk;
    j["steps"] = m.steps;
    j["seed"] = m.seed;
    j["c"] = m.c;
    j["lazy"] = m.lazy;
    j["solver"] = m.solver;
    j["gap"] = m.gap;
    j["delta"] = m.delta;
    j["start"] = m.start ? json(*m.start) : json(nullptr);
    j["output_path"] = m.output_path;
    j["version"] = m.version;
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text, const std::string& source) {
    const json j = parse_json(text, source);
    if (!j.is_object()) throw InputError(source + ": manifest must be an object");
    RunManifest m;
    auto field = [&](const char* key, auto& dst) {
        if (!j.contains(key)) return;
        try {
            j.at(key).get_to(dst);
        } catch (const json::exception& e) {
            throw InputError(source + ": field " + key + ": " + e.what());
        }
    };
    field("command", m.command);
    field("polytope_path", m.polytope_path);
    field("walk", m.walk);
    field("steps", m.steps);
    field("seed", m.seed);
    field("c", m.c);
    field("lazy", m.lazy);
    field("solver", m.solver);
    field("gap", m.gap);
    field("delta", m.delta);
    field("output_path", m.output_path);
    field("version", m.version);
    if (j.contains("start") && !j["start"].is_null()) {
        std::vector<double> s;
        field("start", s);
        m.start = std::move(s);
    }
    return m;
}

void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << manifest_to_json(m);
    if (!out) throw InputError("write failed for '" + path + "'");
}

RunManifest read_manifest(const std::string& path) { return manifest_from_json(read_file(path), path); }

} // namespace johnwalk::io
