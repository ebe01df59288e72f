#include "strongcomp/acceptance.hpp"

#include <iostream>

int main() {
    const auto results = strongcomp::run_acceptance(
        [](const strongcomp::CriterionResult& r) { std::cout << strongcomp::format_result(r) << std::endl; });
    std::size_t failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
