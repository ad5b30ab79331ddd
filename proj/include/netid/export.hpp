#pragma once

#include "netid/adaptive.hpp"
#include "netid/metrics.hpp"
#include "netid/scenario.hpp"

#include <string>
#include <vector>

namespace netid {

/// Floating-point text form used by every delimited export: 17 significant
/// digits, enough for bit-faithful replay comparison.
std::string fmt17(double v);

enum class ExportFormat { Csv, Summary, Both };
ExportFormat parse_export_format(const std::string& s);

/// Wide-format trajectory table: one row per logged time, columns
/// time, x_i, xm_i, e_i, u_i, d_i, k_i_j, v_err (and s_norm in sliding mode).
void write_trajectory_csv(const std::string& path, const TrajectoryLog& log);

/// Structured summary document: scalar metrics, detections, PE status,
/// and the scenario document itself for replay.
void write_summary_json(const std::string& path, const Scenario& sc,
                        const MetricReport& rep);

/// Per-figure data files (fig1..fig8).
void write_figure_csv(const std::string& path, const std::string& figure,
                      const BuiltScenario& built, const TrajectoryLog& log,
                      const MetricReport& rep);

/// Everything a finished run hands back.
struct RunOutput {
    Scenario scenario;
    MetricReport report;
    std::string out_dir;                // empty when nothing was exported
    std::vector<std::string> files;
};

/// Execute a scenario end to end: build, run, compute metrics, export.
/// out_root empty -> no files are written.
RunOutput run_and_report(const Scenario& sc, const std::string& out_root = "",
                         ExportFormat format = ExportFormat::Both);

}  // namespace netid
