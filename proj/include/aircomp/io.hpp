#pragma once
// JSON documents for instances and solutions, and number formatting for CSV.
//
// Instance:  {"devices": [{"h", "b_max", "c", "D"}, ...], "S_T", "sigma2"}
// Solution:  {"a", "b", "beta", "S", "mse", ...}

#include <filesystem>
#include <string>

#include <json.hpp>

#include "aircomp/lower_solver.hpp"
#include "aircomp/model.hpp"
#include "aircomp/upper_solver.hpp"

namespace aircomp {

using json = nlohmann::ordered_json;

json to_json(const ProblemInstance& inst);
/// Parses the field layout only; ranges are checked by validate_instance.
/// Throws ValidationError on missing or mistyped fields.
ProblemInstance instance_from_json(const json& doc);

ProblemInstance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const ProblemInstance& inst);

json to_json(const Allocation& alloc);
json to_json(double a, const LowerSolution& sol, const std::vector<double>& S);
json to_json(const GlobalSolution& sol);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace aircomp
