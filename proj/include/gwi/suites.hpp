#pragma once

#include <string>
#include <vector>

#include "gwi/config.hpp"
#include "gwi/model.hpp"
#include "gwi/report.hpp"

namespace gwi::suites {

// One output file of a suite run (written by the caller as CSV and/or JSON).
struct ReportFile {
    std::string name;  // file stem, e.g. "identity" or "dist_pmf"
    report::Meta meta;
    report::Table table;
};

struct SuiteResult {
    std::string suite;
    std::string claim;
    bool passed = true;
    std::vector<std::string> failures;
    std::vector<ReportFile> reports;
};

// Descriptive tag naming the verified claim; embedded in report metadata.
const std::string& claim_tag(const std::string& suite_name);

// Grid keys the suite requires; used for config validation before running.
std::vector<std::string> required_grids(const std::string& suite_name);

// Runs one suite. `parallel` distributes independent grid points over
// threads; outputs are ordered by grid key and byte-identical to a serial
// run (per-point seeds depend only on the grid index).
SuiteResult run_suite(const std::string& suite_name, const GwiModel& model,
                      const config::SuiteParams& params, bool parallel);

} // namespace gwi::suites
