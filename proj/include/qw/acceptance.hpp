#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qw {

struct CriterionResult {
  int id = 0;
  std::string title;
  std::string status;  // PASS, FAIL or SKIP
  double measured = 0;
  double threshold = 0;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  std::vector<std::string> fixtures;  // empty: all
  std::optional<double> tol;          // replaces every absolute residual tolerance
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});
std::string format_line(const CriterionResult& r);
std::string results_to_json(const std::vector<CriterionResult>& rs);

}  // namespace qw
