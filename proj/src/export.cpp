#include "netid/export.hpp"

#include "netid/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace netid {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ExportFormat parse_export_format(const std::string& s) {
    if (s == "csv") return ExportFormat::Csv;
    if (s == "summary") return ExportFormat::Summary;
    if (s == "both") return ExportFormat::Both;
    throw ArgumentError("unknown format '" + s + "' (expected csv, summary, or both)");
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // '\n' endings on every platform
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

void write_row(std::ofstream& out, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << fmt17(values[i]);
    }
    out << '\n';
}

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log) {
    auto out = open_out(path);
    const bool sliding = log.mode == AdaptMode::Sliding;

    out << "time";
    for (int i = 0; i < log.n; ++i) out << ",x_" << (i + 1);
    for (int i = 0; i < log.n; ++i) out << ",xm_" << (i + 1);
    for (int i = 0; i < log.n; ++i) out << ",e_" << (i + 1);
    for (int i = 0; i < log.m; ++i) out << ",u_" << (i + 1);
    for (int i = 0; i < log.m; ++i) out << ",d_" << (i + 1);
    for (int r = 0; r < log.m; ++r)
        for (int c = 0; c < log.n; ++c) out << ",k_" << (r + 1) << "_" << (c + 1);
    out << ",v_err";
    if (sliding) out << ",s_norm";
    out << '\n';

    std::vector<double> row;
    row.reserve(1 + 3 * log.n + 2 * log.m + log.m * log.n + 2);
    for (std::size_t s = 0; s < log.size(); ++s) {
        row.clear();
        row.push_back(log.times[s]);
        for (int i = 0; i < log.n; ++i) row.push_back(log.x[s](i));
        for (int i = 0; i < log.n; ++i) row.push_back(log.x_m[s](i));
        for (int i = 0; i < log.n; ++i) row.push_back(log.e[s](i));
        for (int i = 0; i < log.m; ++i) row.push_back(log.u[s](i));
        for (int i = 0; i < log.m; ++i) row.push_back(log.d[s](i));
        for (int r = 0; r < log.m; ++r)
            for (int c = 0; c < log.n; ++c) row.push_back(log.k[s](r, c));
        row.push_back(log.v_err[s]);
        if (sliding) row.push_back(log.s_norm[s]);
        write_row(out, row);
    }
}

void write_summary_json(const std::string& path, const Scenario& sc,
                        const MetricReport& rep) {
    Json j;
    j["scenario"] = scenario_to_json(sc);

    Json run;
    run["samples"] = rep.times.size();
    run["diverged"] = rep.diverged;
    if (rep.diverged) run["diverged_time"] = rep.diverged_time;
    run["disturbance_bound_declared"] = rep.disturbance_bound_declared;
    run["disturbance_bound_realized"] = rep.disturbance_bound_realized;
    if (sc.adaptive.mode == "sliding") run["rho"] = rep.rho;
    j["run"] = std::move(run);

    Json metrics;
    metrics["steady_window"] = {rep.steady_t0, rep.steady_t1};
    if (!rep.topo_err_rel.empty()) {
        metrics["final_topology_error"] = rep.final_topo_err;
        metrics["steady_topology_error_mean"] = rep.steady_topo_err_mean;
    }
    if (!rep.tracking_err.empty()) {
        metrics["final_tracking_error"] = rep.final_tracking_err;
        metrics["steady_tracking_error_max"] = rep.steady_tracking_err_max;
    }
    if (!rep.dispersion.empty())
        metrics["steady_dispersion_max"] = rep.steady_dispersion_max;
    if (!rep.ramp_dev.empty()) metrics["steady_ramp_dev_max"] = rep.steady_ramp_dev_max;
    if (!rep.link_steady_std.empty()) {
        Json links;
        for (const auto& [name, std_val] : rep.link_steady_std) {
            links[name] = {{"steady_std", std_val},
                           {"steady_sup_dev", rep.link_steady_sup_dev.at(name)}};
        }
        metrics["links"] = std::move(links);
    }
    if (rep.pe_computed) {
        metrics["pe"] = {{"satisfied", rep.pe.satisfied},
                         {"min_eig", rep.pe.min_eig_over_windows},
                         {"window", rep.pe.window},
                         {"alpha", rep.pe.alpha},
                         {"windows_checked", rep.pe.windows_checked}};
    }
    if (!rep.diagnostics.v.empty()) {
        int violations = 0;
        const double slack = 1e-8 * rep.diagnostics.v.front();
        for (std::size_t i = 1; i < rep.diagnostics.v.size(); ++i)
            if (rep.diagnostics.v[i] > rep.diagnostics.v[i - 1] + slack) ++violations;
        metrics["lyapunov"] = {{"k_star_available", rep.k_star_available},
                               {"v_initial", rep.diagnostics.v.front()},
                               {"v_final", rep.diagnostics.v.back()},
                               {"monotone_violations", violations}};
    }
    j["metrics"] = std::move(metrics);

    Json det = Json::array();
    for (const auto& ev : rep.detections)
        det.push_back({{"link", {ev.i + 1, ev.j + 1}},
                       {"time", ev.detected_time},
                       {"pre_change_weight", ev.pre_change_weight},
                       {"estimated_new_weight", ev.estimated_new_weight}});
    j["detections"] = std::move(det);

    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_figure_csv(const std::string& path, const std::string& figure,
                      const BuiltScenario& built, const TrajectoryLog& log,
                      const MetricReport& rep) {
    auto out = open_out(path);
    const std::size_t len = log.size();
    std::vector<double> row;

    const auto link_series = [&](const char* which) -> const std::vector<double>& {
        static const std::vector<double> empty;
        const std::string name = link_name(0, 1);
        const auto& src = which[0] == 'e' ? rep.link_est : rep.link_true;
        const auto it = src.find(name);
        return it == src.end() ? empty : it->second;
    };

    if (figure == "fig1") {
        // every recovered weight next to its true value
        out << "time";
        for (int i = 0; i < log.n; ++i)
            for (int j = 0; j < log.n; ++j) out << ",ahat_" << (i + 1) << "_" << (j + 1);
        for (int i = 0; i < log.n; ++i)
            for (int j = 0; j < log.n; ++j) out << ",a_" << (i + 1) << "_" << (j + 1);
        out << '\n';
        for (std::size_t s = 0; s < len; ++s) {
            row.clear();
            row.push_back(log.times[s]);
            const auto est = recover_topology(log.k[s], built.ref.a_m, built.plant.b);
            const Mat a_true = built.plant.adjacency_at(log.times[s]);
            for (int i = 0; i < log.n; ++i)
                for (int j = 0; j < log.n; ++j) row.push_back(est.a_hat(i, j));
            for (int i = 0; i < log.n; ++i)
                for (int j = 0; j < log.n; ++j) row.push_back(a_true(i, j));
            write_row(out, row);
        }
    } else if (figure == "fig2") {
        out << "time,tracking_err";
        for (int i = 0; i < log.n; ++i) out << ",e_" << (i + 1);
        out << '\n';
        for (std::size_t s = 0; s < len; ++s) {
            row.clear();
            row.push_back(log.times[s]);
            row.push_back(rep.tracking_err.empty() ? log.e[s].norm() : rep.tracking_err[s]);
            for (int i = 0; i < log.n; ++i) row.push_back(log.e[s](i));
            write_row(out, row);
        }
    } else if (figure == "fig3" || figure == "fig4" || figure == "fig5" ||
               figure == "fig6") {
        const auto& est = link_series("est");
        const auto& tru = link_series("true");
        out << "time,ahat_1_2,a_1_2\n";
        for (std::size_t s = 0; s < len; ++s) {
            row.clear();
            row.push_back(log.times[s]);
            row.push_back(s < est.size() ? est[s] : 0.0);
            row.push_back(s < tru.size() ? tru[s] : 0.0);
            write_row(out, row);
        }
    } else if (figure == "fig7") {
        out << "time,x_1,xm_1\n";
        for (std::size_t s = 0; s < len; ++s) {
            row.clear();
            row.push_back(log.times[s]);
            row.push_back(log.x[s](0));
            row.push_back(log.x_m[s](0));
            write_row(out, row);
        }
    } else if (figure == "fig8") {
        out << "time";
        for (int i = 0; i < log.n; ++i) out << ",x_" << (i + 1);
        out << ",ramp,dispersion\n";
        for (std::size_t s = 0; s < len; ++s) {
            row.clear();
            row.push_back(log.times[s]);
            for (int i = 0; i < log.n; ++i) row.push_back(log.x[s](i));
            row.push_back(log.times[s]);
            row.push_back(rep.dispersion.empty()
                              ? log.x[s].maxCoeff() - log.x[s].minCoeff()
                              : rep.dispersion[s]);
            write_row(out, row);
        }
    } else {
        throw ArgumentError("unknown figure tag '" + figure + "'");
    }
}

RunOutput run_and_report(const Scenario& sc, const std::string& out_root,
                         ExportFormat format) {
    RunOutput out;
    out.scenario = sc;

    BuiltScenario built = build_scenario(sc);
    const TrajectoryLog log =
        run_closed_loop(built.plant, built.ref, built.cfg, built.scfg, built.opt,
                        built.run_rng);
    out.report = compute_metrics(sc, built, log);

    if (!out_root.empty()) {
        namespace fs = std::filesystem;
        const fs::path dir =
            fs::path(out_root) / (sc.name + "-seed" + std::to_string(sc.seed));
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw Error("cannot create output directory '" + dir.string() + "'");
        out.out_dir = dir.string();

        if (format == ExportFormat::Csv || format == ExportFormat::Both) {
            const auto traj = (dir / "trajectory.csv").string();
            write_trajectory_csv(traj, log);
            out.files.push_back(traj);
            for (const auto& fig : sc.exports.figures) {
                const auto figpath = (dir / (fig + ".csv")).string();
                write_figure_csv(figpath, fig, built, log, out.report);
                out.files.push_back(figpath);
            }
        }
        if (format == ExportFormat::Summary || format == ExportFormat::Both) {
            const auto sum = (dir / "summary.json").string();
            write_summary_json(sum, sc, out.report);
            out.files.push_back(sum);
        }
    }
    return out;
}

}  // namespace netid
