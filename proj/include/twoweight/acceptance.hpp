#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twoweight/report.hpp"

namespace twoweight {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0 when the criterion has no runtime bound
  std::string summary;          // one line, no newlines
  Json details;
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty runs 1..9
  std::uint64_t seed = 20240611;
};

inline constexpr int kCriterionCount = 9;

CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "[PASS] 3 Cantor sharpness: ..." style line.
std::string format_line(const CriterionResult& r);
Json to_json(const CriterionResult& r);

}  // namespace twoweight
