#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hopf::acceptance {

struct CheckResult {
    std::string id;
    std::string name;
    bool passed = false;
    std::string detail;  // numbers only, deterministic for a fixed seed
};

// Quick: analytic constants, simulated gamma0/Psi, density oracles, small-sigma.
// Runs in well under two minutes.
std::vector<CheckResult> run_quick(std::uint64_t seed, int threads);

// Full: everything in quick plus certificates, asymptotic regimes, diagram
// anchors, symmetry suites, cross-method agreement, and CLI determinism.
// cli_path is the hopf-lyap binary used for the determinism check; empty
// fails that check with an explanatory detail.
std::vector<CheckResult> run_full(std::uint64_t seed, int threads,
                                  const std::string& cli_path);

bool all_passed(const std::vector<CheckResult>& results);

// "[PASS] id name: detail" / "[FAIL] ...".
std::string format_line(const CheckResult& r);

// JSON array used by `verify --out`; stable field order and number format.
std::string to_json(const std::vector<CheckResult>& results);

}  // namespace hopf::acceptance
