#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cheshire/dynamics.hpp"

namespace cheshire::acceptance {

struct Options {
    /// Kick sign used by the meter-dynamics checks.
    SignConvention sign = SignConvention::consistent;
    /// Run only the check with this id (or criterion number as text).
    std::optional<std::string> only;
};

struct CheckResult {
    int criterion = 0;
    std::string id;
    std::string title;
    bool passed = false;
    /// Reported but not counted (paper-sign runs of sign-sensitive checks).
    bool informational = false;
    std::string detail;
    double seconds = 0.0;
};

struct CheckInfo {
    int criterion;
    const char *id;
    const char *title;
};

/// cheshire, amplification, noisy, disembodiment, pointer, dyson, convergence, parallel_noise, three_body.
const std::vector<CheckInfo> &checks();

/// Throws ValueError when `only` names no check.
std::vector<CheckResult> run(const Options &options = {});

/// "PASS"/"FAIL"/"INFO" line for one result.
std::string format_line(const CheckResult &r);

/// True when every non-informational result passed.
bool all_passed(const std::vector<CheckResult> &results);

}  // namespace cheshire::acceptance
