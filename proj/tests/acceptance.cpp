// Acceptance runner: one pass/fail line per criterion. With an argument
// (1..9) it runs just that criterion; otherwise all of them.
#include <cstdlib>
#include <iostream>
#include <map>

#include "gmtk/selftest.hpp"

int main(int argc, char** argv) {
    int which = 0;
    if (argc > 1) which = std::atoi(argv[1]);

    auto lines = gmtk::run_acceptance(which);
    std::map<int, bool> per_criterion;
    std::map<int, std::string> failures;
    for (const auto& line : lines) {
        auto it = per_criterion.find(line.criterion);
        if (it == per_criterion.end())
            per_criterion[line.criterion] = line.pass;
        else
            it->second = it->second && line.pass;
        if (!line.pass)
            failures[line.criterion] += "\n    failed: " + line.name +
                                        (line.detail.empty() ? "" : " (" + line.detail + ")");
    }

    bool all = true;
    for (const auto& [criterion, pass] : per_criterion) {
        std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL")
                  << failures[criterion] << "\n";
        all = all && pass;
    }
    return all ? 0 : 1;
}
