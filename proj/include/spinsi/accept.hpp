#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace spinsi {

constexpr const char* kVersion = "0.1.0";

struct CriterionResult {
    int number = 0;
    std::string name;    // stable check identifier
    bool passed = false;
    bool skipped = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceReport {
    std::vector<CriterionResult> criteria;
    uint64_t seed = 0;
    int threads = 1;

    bool all_passed() const;
};

// Runs every acceptance criterion in order, printing one pass/fail line per
// criterion to `log`. `only` restricts to a single criterion number (0 = all).
AcceptanceReport run_acceptance(uint64_t seed, int threads, std::ostream& log, int only = 0);

std::string acceptance_report_json(const AcceptanceReport& report);

}  // namespace spinsi
