#include "netid/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>

namespace netid {

namespace {

Json mat_to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw ArgumentError("config: " + path + " must be a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ArgumentError("config: " + path + " rows must be non-empty arrays");
    Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ArgumentError("config: " + path + " rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number())
                throw ArgumentError("config: " + path + " entries must be numbers");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                j[i][c].get<double>();
        }
    }
    return m;
}

// Pull a typed field, enforcing presence of only known keys per section.
template <typename T>
void get_field(const Json& j, const char* key, T& out, const std::string& section) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ArgumentError("config: " + section + "." + key + " has the wrong type");
    }
}

void check_keys(const Json& j, const std::set<std::string>& allowed,
                const std::string& section) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ArgumentError("config: unknown key '" + section + "." + item.key() + "'");
}

}  // namespace

Json scenario_to_json(const Scenario& sc) {
    Json j;
    j["name"] = sc.name;
    j["description"] = sc.description;
    j["seed"] = sc.seed;
    j["horizon"] = sc.horizon;
    j["dt"] = sc.dt;
    j["decimation"] = sc.decimation;

    Json plant;
    plant["n"] = sc.plant.n;
    plant["graph"] = sc.plant.graph;
    if (sc.plant.graph == "explicit") plant["a"] = mat_to_json(sc.plant.a_explicit);
    plant["b"] = sc.plant.b;
    if (sc.plant.b == "explicit") plant["b_matrix"] = mat_to_json(sc.plant.b_explicit);
    plant["pins"] = Json::array();
    for (const auto& p : sc.plant.pins)
        plant["pins"].push_back(
            {{"i", p.i}, {"j", p.j}, {"value", p.value}, {"mirror", p.mirror}});
    plant["events"] = Json::array();
    for (const auto& e : sc.plant.events)
        plant["events"].push_back({{"time", e.time},
                                   {"i", e.i},
                                   {"j", e.j},
                                   {"value", e.value},
                                   {"mirror", e.mirror}});
    plant["overrides"] = Json::array();
    for (const auto& o : sc.plant.overrides)
        plant["overrides"].push_back({{"i", o.i},
                                      {"j", o.j},
                                      {"kind", o.kind},
                                      {"amplitude", o.amplitude},
                                      {"period", o.period},
                                      {"mirror", o.mirror}});
    j["plant"] = std::move(plant);

    Json ref;
    ref["a_m"] = sc.reference.a_m;
    if (sc.reference.a_m == "explicit")
        ref["a_m_matrix"] = mat_to_json(sc.reference.a_m_explicit);
    ref["pole"] = sc.reference.pole;
    ref["signal"] = {{"kind", sc.reference.signal.kind},
                     {"w0", sc.reference.signal.w0},
                     {"step_level", sc.reference.signal.step_level}};
    j["reference"] = std::move(ref);

    j["adaptive"] = {{"w_scale", sc.adaptive.w_scale}, {"mode", sc.adaptive.mode}};
    j["sliding"] = {{"epsilon", sc.sliding.epsilon},
                    {"delta", sc.sliding.delta},
                    {"rho", sc.sliding.rho},
                    {"rho_value", sc.sliding.rho_value}};
    j["disturbance"] = {{"kind", sc.disturbance.kind},
                        {"sigma", sc.disturbance.sigma},
                        {"bound", sc.disturbance.bound},
                        {"lo", sc.disturbance.lo},
                        {"hi", sc.disturbance.hi}};
    j["init"] = {{"x0", sc.init.x0}, {"xm0", sc.init.xm0}, {"k0", sc.init.k0}};

    Json metrics;
    metrics["topology"] = sc.metrics.topology;
    metrics["tracking"] = sc.metrics.tracking;
    metrics["dispersion"] = sc.metrics.dispersion;
    metrics["ramp"] = sc.metrics.ramp;
    metrics["pe"] = sc.metrics.pe;
    metrics["lyapunov"] = sc.metrics.lyapunov;
    metrics["links"] = Json::array();
    for (const auto& l : sc.metrics.links) metrics["links"].push_back({l[0], l[1]});
    metrics["detect"] = sc.metrics.detect;
    metrics["detect_threshold"] = sc.metrics.detect_threshold;
    metrics["detect_dwell"] = sc.metrics.detect_dwell;
    metrics["detect_median_window"] = sc.metrics.detect_median_window;
    metrics["detect_warmup"] = sc.metrics.detect_warmup;
    metrics["pe_window"] = sc.metrics.pe_window;
    metrics["pe_alpha"] = sc.metrics.pe_alpha;
    j["metrics"] = std::move(metrics);

    j["exports"] = {{"figures", sc.exports.figures}};
    return j;
}

Scenario scenario_from_json(const Json& j) {
    Scenario sc;
    check_keys(j, {"name", "description", "seed", "horizon", "dt", "decimation", "plant",
                   "reference", "adaptive", "sliding", "disturbance", "init", "metrics",
                   "exports"},
               "scenario");
    get_field(j, "name", sc.name, "scenario");
    get_field(j, "description", sc.description, "scenario");
    get_field(j, "seed", sc.seed, "scenario");
    get_field(j, "horizon", sc.horizon, "scenario");
    get_field(j, "dt", sc.dt, "scenario");
    get_field(j, "decimation", sc.decimation, "scenario");

    if (j.contains("plant")) {
        const auto& p = j.at("plant");
        check_keys(p, {"n", "graph", "a", "b", "b_matrix", "pins", "events", "overrides"},
                   "plant");
        get_field(p, "n", sc.plant.n, "plant");
        get_field(p, "graph", sc.plant.graph, "plant");
        if (p.contains("a")) sc.plant.a_explicit = mat_from_json(p.at("a"), "plant.a");
        get_field(p, "b", sc.plant.b, "plant");
        if (p.contains("b_matrix"))
            sc.plant.b_explicit = mat_from_json(p.at("b_matrix"), "plant.b_matrix");
        if (p.contains("pins")) {
            sc.plant.pins.clear();
            for (const auto& pin : p.at("pins")) {
                check_keys(pin, {"i", "j", "value", "mirror"}, "plant.pins[]");
                PlantSpec::Pin out;
                get_field(pin, "i", out.i, "plant.pins[]");
                get_field(pin, "j", out.j, "plant.pins[]");
                get_field(pin, "value", out.value, "plant.pins[]");
                get_field(pin, "mirror", out.mirror, "plant.pins[]");
                sc.plant.pins.push_back(out);
            }
        }
        if (p.contains("events")) {
            sc.plant.events.clear();
            for (const auto& ev : p.at("events")) {
                check_keys(ev, {"time", "i", "j", "value", "mirror"}, "plant.events[]");
                PlantSpec::Event out;
                get_field(ev, "time", out.time, "plant.events[]");
                get_field(ev, "i", out.i, "plant.events[]");
                get_field(ev, "j", out.j, "plant.events[]");
                get_field(ev, "value", out.value, "plant.events[]");
                get_field(ev, "mirror", out.mirror, "plant.events[]");
                sc.plant.events.push_back(out);
            }
        }
        if (p.contains("overrides")) {
            sc.plant.overrides.clear();
            for (const auto& ov : p.at("overrides")) {
                check_keys(ov, {"i", "j", "kind", "amplitude", "period", "mirror"},
                           "plant.overrides[]");
                PlantSpec::Override out;
                get_field(ov, "i", out.i, "plant.overrides[]");
                get_field(ov, "j", out.j, "plant.overrides[]");
                get_field(ov, "kind", out.kind, "plant.overrides[]");
                get_field(ov, "amplitude", out.amplitude, "plant.overrides[]");
                get_field(ov, "period", out.period, "plant.overrides[]");
                get_field(ov, "mirror", out.mirror, "plant.overrides[]");
                sc.plant.overrides.push_back(out);
            }
        }
    }

    if (j.contains("reference")) {
        const auto& r = j.at("reference");
        check_keys(r, {"a_m", "a_m_matrix", "pole", "signal"}, "reference");
        get_field(r, "a_m", sc.reference.a_m, "reference");
        if (r.contains("a_m_matrix"))
            sc.reference.a_m_explicit =
                mat_from_json(r.at("a_m_matrix"), "reference.a_m_matrix");
        get_field(r, "pole", sc.reference.pole, "reference");
        if (r.contains("signal")) {
            const auto& s = r.at("signal");
            check_keys(s, {"kind", "w0", "step_level"}, "reference.signal");
            get_field(s, "kind", sc.reference.signal.kind, "reference.signal");
            get_field(s, "w0", sc.reference.signal.w0, "reference.signal");
            get_field(s, "step_level", sc.reference.signal.step_level, "reference.signal");
        }
    }

    if (j.contains("adaptive")) {
        const auto& a = j.at("adaptive");
        check_keys(a, {"w_scale", "mode"}, "adaptive");
        get_field(a, "w_scale", sc.adaptive.w_scale, "adaptive");
        get_field(a, "mode", sc.adaptive.mode, "adaptive");
    }

    if (j.contains("sliding")) {
        const auto& s = j.at("sliding");
        check_keys(s, {"epsilon", "delta", "rho", "rho_value"}, "sliding");
        get_field(s, "epsilon", sc.sliding.epsilon, "sliding");
        get_field(s, "delta", sc.sliding.delta, "sliding");
        get_field(s, "rho", sc.sliding.rho, "sliding");
        get_field(s, "rho_value", sc.sliding.rho_value, "sliding");
    }

    if (j.contains("disturbance")) {
        const auto& d = j.at("disturbance");
        check_keys(d, {"kind", "sigma", "bound", "lo", "hi"}, "disturbance");
        get_field(d, "kind", sc.disturbance.kind, "disturbance");
        get_field(d, "sigma", sc.disturbance.sigma, "disturbance");
        get_field(d, "bound", sc.disturbance.bound, "disturbance");
        get_field(d, "lo", sc.disturbance.lo, "disturbance");
        get_field(d, "hi", sc.disturbance.hi, "disturbance");
    }

    if (j.contains("init")) {
        const auto& i = j.at("init");
        check_keys(i, {"x0", "xm0", "k0"}, "init");
        get_field(i, "x0", sc.init.x0, "init");
        get_field(i, "xm0", sc.init.xm0, "init");
        get_field(i, "k0", sc.init.k0, "init");
    }

    if (j.contains("metrics")) {
        const auto& m = j.at("metrics");
        check_keys(m,
                   {"topology", "tracking", "dispersion", "ramp", "pe", "lyapunov", "links",
                    "detect", "detect_threshold", "detect_dwell", "detect_median_window",
                    "detect_warmup", "pe_window", "pe_alpha"},
                   "metrics");
        get_field(m, "topology", sc.metrics.topology, "metrics");
        get_field(m, "tracking", sc.metrics.tracking, "metrics");
        get_field(m, "dispersion", sc.metrics.dispersion, "metrics");
        get_field(m, "ramp", sc.metrics.ramp, "metrics");
        get_field(m, "pe", sc.metrics.pe, "metrics");
        get_field(m, "lyapunov", sc.metrics.lyapunov, "metrics");
        if (m.contains("links")) {
            sc.metrics.links.clear();
            for (const auto& l : m.at("links")) {
                if (!l.is_array() || l.size() != 2)
                    throw ArgumentError("config: metrics.links entries must be [i, j]");
                sc.metrics.links.push_back({l[0].get<int>(), l[1].get<int>()});
            }
        }
        get_field(m, "detect", sc.metrics.detect, "metrics");
        get_field(m, "detect_threshold", sc.metrics.detect_threshold, "metrics");
        get_field(m, "detect_dwell", sc.metrics.detect_dwell, "metrics");
        get_field(m, "detect_median_window", sc.metrics.detect_median_window, "metrics");
        get_field(m, "detect_warmup", sc.metrics.detect_warmup, "metrics");
        get_field(m, "pe_window", sc.metrics.pe_window, "metrics");
        get_field(m, "pe_alpha", sc.metrics.pe_alpha, "metrics");
    }

    if (j.contains("exports")) {
        const auto& e = j.at("exports");
        check_keys(e, {"figures"}, "exports");
        get_field(e, "figures", sc.exports.figures, "exports");
    }
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("config: cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ArgumentError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario_file(const std::string& path, const Scenario& sc) {
    std::ofstream out(path);
    if (!out) throw Error("config: cannot write '" + path + "'");
    out << scenario_to_json(sc).dump(2) << "\n";
}

void apply_override(Json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ArgumentError("override must look like path.to.key=value: '" + spec + "'");
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);

    Json value;
    try {
        value = Json::parse(raw);
    } catch (const std::exception&) {
        value = raw;  // unquoted string
    }

    Json* node = &doc;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (key.empty()) throw ArgumentError("override has an empty path segment: '" + spec + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

}  // namespace netid
