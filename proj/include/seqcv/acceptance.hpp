#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seqcv {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240601;
    int threads = 1;
};

std::vector<int> criterion_ids();

/// Unknown ids raise a configuration error.
CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// "[PASS] 03 name: detail"
std::string format_result(const CriterionResult& result);

}  // namespace seqcv
