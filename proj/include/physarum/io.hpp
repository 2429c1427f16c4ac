#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "physarum/lp.hpp"
#include "physarum/problems.hpp"

namespace physarum::io {

using nlohmann::json;

// {"A": [[...], ...], "b": [...], "c": [...], "names": [...]?}
StandardFormLP lp_from_json(const json& j);
json to_json(const StandardFormLP& lp);

// {"x", "objective", "residual", "status", "trace": [{"iter", ...}]}
json to_json(const SolveResult& r);

// {"C": [[...]], "gamma": g}
MatchingInstance matching_from_json(const json& j);
json to_json(const MatchingInstance& inst);

// {"points", "labels", "kernel": {"type", "sigma"}, "C", "M"}
SvmInstance svm_from_json(const json& j);
json to_json(const SvmInstance& inst);

// {"nodes": N, "arcs": [[tail, head, weight], ...]}
Graph graph_from_json(const json& j);
json to_json(const Graph& g);

/// Throws std::runtime_error on missing files or malformed JSON.
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace physarum::io
