#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace fastslow::app {

enum class CheckStatus { Pass, Fail, ExpectedDivergence };

std::string_view to_string(CheckStatus s);

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::Fail;
  std::string detail;
};

/// Symbolic goldens of the modified equations plus the numeric cross-checks
/// of the canard analysis. Never throws; a check that throws is a Fail.
std::vector<Check> run_validation();

/// True when no check has status Fail.
bool all_passed(const std::vector<Check>& checks);

nlohmann::json to_json(const std::vector<Check>& checks);

}  // namespace fastslow::app
