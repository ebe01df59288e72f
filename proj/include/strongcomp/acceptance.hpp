#pragma once

#include <functional>
#include <string>
#include <vector>

namespace strongcomp {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// "PASS [id] name: detail (t s)"
std::string format_result(const CriterionResult& r);

/// Runs the ten desk-scale acceptance checks in order. The callback sees each
/// result as soon as it is available.
std::vector<CriterionResult> run_acceptance(
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace strongcomp
