#pragma once

#include "netid/export.hpp"
#include "netid/scenario.hpp"

#include <string>
#include <vector>

namespace netid {

struct BatchItem {
    Scenario scenario;
    MetricReport report;
    bool failed = false;
    std::string error;
    std::vector<std::string> files;
};

// Batch scenario execution, one scenario per worker. Scenarios are
// independent jobs with their own seed-derived streams, so the parallel
// path produces results identical to the serial reference; results come
// back in input order either way.
std::vector<BatchItem> run_batch(const std::vector<Scenario>& scenarios,
                                 ExecPolicy policy,
                                 const std::string& out_root = "",
                                 ExportFormat format = ExportFormat::Both);

}  // namespace netid
