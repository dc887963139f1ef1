#pragma once

#include <functional>
#include <string>
#include <vector>

namespace topamp {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int threads = 0;
    std::vector<int> only;  // empty: all criteria
};

inline constexpr int kCriterionCount = 10;

CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});
std::string format_result(const CriterionResult& r);

}  // namespace topamp
