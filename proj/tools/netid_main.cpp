// netid — adaptive network identification and control, scenario runner.
//
// Exit codes: 0 success, 2 config/validation error, 3 diverged run,
// 4 I/O error. Stable contract, scripted against in CI.

#include "netid/batch.hpp"
#include "netid/calibration.hpp"
#include "netid/config.hpp"
#include "netid/export.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitIo = 4;

std::string default_out_root() {
    if (const char* env = std::getenv("NETID_OUT_ROOT")) return env;
    return "out";
}

netid::Scenario assemble_scenario(const std::string& scenario_name,
                                  const std::string& config_path,
                                  std::optional<std::uint64_t> seed,
                                  std::optional<double> dt,
                                  std::optional<double> horizon,
                                  const std::vector<std::string>& overrides) {
    using netid::Json;
    Json doc;
    if (!config_path.empty()) {
        doc = netid::scenario_to_json(netid::load_scenario_file(config_path));
    } else if (!scenario_name.empty()) {
        doc = netid::scenario_to_json(
            netid::make_scenario(scenario_name, seed.value_or(1)));
    } else {
        throw netid::ArgumentError("one of --scenario or --config is required");
    }
    if (seed) doc["seed"] = *seed;
    if (dt) doc["dt"] = *dt;
    if (horizon) doc["horizon"] = *horizon;
    for (const auto& ov : overrides) netid::apply_override(doc, ov);
    return netid::scenario_from_json(doc);  // full type check after overrides
}

void print_summary(const netid::Scenario& sc, const netid::MetricReport& rep) {
    std::printf("scenario        %s (seed %llu)\n", sc.name.c_str(),
                static_cast<unsigned long long>(sc.seed));
    std::printf("horizon / dt    %g / %g, %zu logged samples\n", sc.horizon, sc.dt,
                rep.times.size());
    if (rep.diverged)
        std::printf("status          DIVERGED at t = %g\n", rep.diverged_time);
    if (!rep.topo_err_rel.empty())
        std::printf("topology error  final %.4g, steady mean %.4g\n", rep.final_topo_err,
                    rep.steady_topo_err_mean);
    if (!rep.tracking_err.empty())
        std::printf("tracking error  final %.4g, steady max %.4g\n",
                    rep.final_tracking_err, rep.steady_tracking_err_max);
    if (!rep.dispersion.empty())
        std::printf("dispersion      steady max %.4g\n", rep.steady_dispersion_max);
    if (!rep.ramp_dev.empty())
        std::printf("ramp deviation  steady max %.4g\n", rep.steady_ramp_dev_max);
    for (const auto& [name, std_val] : rep.link_steady_std)
        std::printf("link %-10s steady std %.4g, steady sup dev %.4g\n", name.c_str(),
                    std_val, rep.link_steady_sup_dev.at(name));
    if (rep.pe_computed)
        std::printf("excitation      %s (min eig %.4g over %d windows of %.3g)\n",
                    rep.pe.satisfied ? "satisfied" : "NOT satisfied",
                    rep.pe.min_eig_over_windows, rep.pe.windows_checked, rep.pe.window);
    if (rep.detections.empty()) {
        std::printf("detections      none\n");
    } else {
        for (const auto& ev : rep.detections)
            std::printf("detection       a_%d_%d at t = %.3f (pre %.3f -> post %.3f)\n",
                        ev.i + 1, ev.j + 1, ev.detected_time, ev.pre_change_weight,
                        ev.estimated_new_weight);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive identification and control of LTI networks"};
    app.require_subcommand(1);

    // run ------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run a scenario and export results");
    std::string scenario_name, config_path, out_root = default_out_root();
    std::string format_str = "both";
    std::optional<std::uint64_t> seed;
    std::optional<double> dt, horizon;
    std::vector<std::string> overrides;
    bool dry_run = false;
    run->add_option("--scenario", scenario_name, "catalog scenario name");
    run->add_option("--config", config_path, "scenario config file (JSON)");
    run->add_option("--seed", seed, "random seed");
    run->add_option("--out", out_root,
                    "output root directory (default $NETID_OUT_ROOT or ./out)");
    run->add_option("--dt", dt, "integration step override");
    run->add_option("--horizon", horizon, "horizon override");
    run->add_option("--override", overrides,
                    "config override, dotted path (e.g. adaptive.w_scale=5)");
    run->add_flag("--dry-run", dry_run, "validate and build only, run nothing");
    run->add_option("--format", format_str, "exports: csv, summary, or both")
        ->check(CLI::IsMember({"csv", "summary", "both"}));

    // list -----------------------------------------------------------------
    auto* list = app.add_subcommand("list", "list catalog scenarios");

    // validate -------------------------------------------------------------
    auto* validate = app.add_subcommand("validate", "validate a scenario config file");
    std::string validate_path;
    validate->add_option("path", validate_path, "config file")->required();

    // calibrate ------------------------------------------------------------
    auto* calibrate = app.add_subcommand(
        "calibrate", "regenerate the calibrated thresholds from oracle pre-runs");
    std::vector<std::uint64_t> cal_seeds;
    std::string cal_out = "calibration.json";
    calibrate->add_option("--seeds", cal_seeds, "seed list (default 1..20)");
    calibrate->add_option("--out", cal_out, "output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            std::printf("%-20s %-8s %s\n", "name", "figures", "description");
            for (const auto& entry : netid::scenario_catalog())
                std::printf("%-20s %-8s %s\n", entry.name.c_str(), entry.figure.c_str(),
                            entry.description.c_str());
            return kExitOk;
        }

        if (validate->parsed()) {
            try {
                const auto sc = netid::load_scenario_file(validate_path);
                netid::build_scenario(sc);  // full invariant validation, no run
            } catch (const std::exception& e) {
                std::fprintf(stderr, "invalid: %s\n", e.what());
                return kExitConfig;
            }
            std::printf("ok\n");
            return kExitOk;
        }

        if (calibrate->parsed()) {
            if (cal_seeds.empty())
                for (std::uint64_t s = 1; s <= 20; ++s) cal_seeds.push_back(s);
            std::printf("calibrating over %zu seeds...\n", cal_seeds.size());
            const auto cal = netid::run_calibration(cal_seeds, true);
            netid::save_calibration(cal_out, cal);
            std::printf("wrote %s\n", cal_out.c_str());
            return kExitOk;
        }

        // run
        netid::Scenario sc;
        try {
            sc = assemble_scenario(scenario_name, config_path, seed, dt, horizon,
                                   overrides);
            netid::build_scenario(sc);  // validate before any computation
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitConfig;
        }
        if (dry_run) {
            std::printf("ok (dry run, nothing executed)\n");
            return kExitOk;
        }

        netid::RunOutput out;
        try {
            out = netid::run_and_report(sc, out_root,
                                        netid::parse_export_format(format_str));
        } catch (const netid::Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitIo;
        }
        print_summary(sc, out.report);
        for (const auto& f : out.files) std::printf("wrote %s\n", f.c_str());
        if (out.report.diverged) return kExitDiverged;
        return kExitOk;
    } catch (const netid::ArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
}
