#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdslab/bits.hpp"

namespace cdslab {

/// Parameters shared by every suite. Unset sizes fall back to each suite's
/// default sweep.
struct SuiteConfig {
    std::string suite;
    std::optional<int> n;
    std::optional<int> k;
    std::optional<int> reps;
    /// Restricts multi-protocol suites to protocols whose name contains it.
    std::string protocol;
    u64 seed = 1;
    int workers = 1;
};

struct SuiteCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteOutput {
    /// One JSON object per result; verifier suites emit VerificationReport objects.
    nlohmann::json records = nlohmann::json::array();
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<SuiteCheck> checks;

    bool passed() const;
};

std::vector<std::string> suite_names();

/// Throws DomainError for an unknown suite or out-of-range sizes.
SuiteOutput run_suite(const SuiteConfig& config);

/// The records as an indented JSON array with a trailing newline.
std::string format_json(const SuiteOutput& out);
/// Header row then one row per result.
std::string format_csv(const SuiteOutput& out);

}  // namespace cdslab
