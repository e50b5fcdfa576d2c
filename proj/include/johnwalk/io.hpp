#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "johnwalk/errors.hpp"
#include "johnwalk/geometry.hpp"

namespace johnwalk::io {

inline constexpr const char* kVersion = "0.1.0";

// {"A": [[...], ...], "b": [...]}; errors name the file, the field and,
// for syntax errors, the line and column.
Polytope parse_polytope(const std::string& text, const std::string& source = "<string>");
Polytope load_polytope(const std::string& path);

// Header x1,...,xn then one row per sample, 17 significant digits.
void write_samples(std::ostream& os, std::span<const Vec> samples, Index n);
void emit_samples(std::span<const Vec> samples, Index n, const std::string& path);
std::vector<Vec> read_samples(const std::string& path);

// Everything needed to repeat a `sample` run.
struct RunManifest {
    std::string command = "sample";
    std::string polytope_path;
    std::string walk = "john";
    std::int64_t steps = 1000;
    std::uint64_t seed = 0;
    double c = 0.5;
    bool lazy = true;
    std::string solver = "oracle";
    double gap = 0.0;   // 0: the walk default
    double delta = 0.0; // ball walk step; 0: derived from the start point
    std::optional<std::vector<double>> start;
    std::string output_path;
    std::string version = kVersion;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text, const std::string& source = "<string>");
void write_manifest(const RunManifest& m, const std::string& path);
RunManifest read_manifest(const std::string& path);

std::string read_file(const std::string& path);

} // namespace johnwalk::io
