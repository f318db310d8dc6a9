// SPDX-License-Identifier: MIT
//
// One line per acceptance criterion:
//   criterion <id> <PASS|FAIL> <name> (<seconds>s): <detail>
// --criterion N (repeatable) restricts the run; exit status 1 if any fails.
#include <cstdio>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "wnkpz/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> ids;
    std::uint64_t seed = 20240607;
    app.add_option("--criterion", ids, "criterion id(s), 1..9")->check(CLI::Range(1, 9));
    app.add_option("--seed", seed, "random seed");
    CLI11_PARSE(app, argc, argv);
    if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    wnkpz::ExperimentConfig cfg;
    cfg.seed = seed;
    bool all = true;
    for (int id : ids) {
        wnkpz::CriterionResult r;
        try {
            r = wnkpz::evaluate_criterion(id, cfg);
        } catch (const std::exception& e) {
            r = {id, "error", false, e.what(), 0.0};
        }
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
        std::cout << "criterion " << r.id << ' ' << (r.passed ? "PASS" : "FAIL") << ' ' << r.name << " (" << secs
                  << "s): " << r.detail << std::endl;
        all = all && r.passed;
    }
    return all ? 0 : 1;
}
