#pragma once

// The acceptance suite: twelve numbered checks with fixed tolerances, shared
// by the test binary and the `verify` subcommand.

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace rsc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    nlohmann::json metrics;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    /// Criteria to run; empty runs all of them.
    std::vector<int> only;
    std::size_t workers = 0;
    /// Directory for the determinism runs; a temporary one when empty.
    std::string scratch_dir;
};

constexpr int kCriterionCount = 12;

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts, const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result_line(const CriterionResult& r);
nlohmann::json acceptance_json(const std::vector<CriterionResult>& results);

} // namespace rsc
