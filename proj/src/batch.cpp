#include "netid/batch.hpp"

#include <cstdint>

namespace netid {

namespace {

BatchItem run_one(const Scenario& sc, const std::string& out_root, ExportFormat format) {
    BatchItem item;
    item.scenario = sc;
    try {
        RunOutput out = run_and_report(sc, out_root, format);
        item.report = std::move(out.report);
        item.files = std::move(out.files);
    } catch (const std::exception& e) {
        item.failed = true;
        item.error = e.what();
    }
    return item;
}

}  // namespace

std::vector<BatchItem> run_batch(const std::vector<Scenario>& scenarios,
                                 ExecPolicy policy, const std::string& out_root,
                                 ExportFormat format) {
    std::vector<BatchItem> items(scenarios.size());
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(scenarios.size()); ++i)
            items[static_cast<std::size_t>(i)] =
                run_one(scenarios[static_cast<std::size_t>(i)], out_root, format);
    } else {
        for (std::size_t i = 0; i < scenarios.size(); ++i)
            items[i] = run_one(scenarios[i], out_root, format);
    }
    return items;
}

}  // namespace netid
