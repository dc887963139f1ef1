#include <cstdlib>
#include <iostream>

#include "topamp/acceptance.hpp"

int main(int argc, char** argv) {
    topamp::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
    bool all = true;
    topamp::run_acceptance(opt, [&](const topamp::CriterionResult& r) {
        std::cout << topamp::format_result(r) << std::endl;
        all = all && r.passed;
    });
    return all ? 0 : 1;
}
