#pragma once

#include "netid/adaptive.hpp"
#include "netid/detect.hpp"
#include "netid/network.hpp"
#include "netid/reference.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace netid {

// Declarative scenario description. Everything below is plain data:
// serializable, diffable, and fully deterministic given the seed.

struct PlantSpec {
    int n = 5;
    std::string graph = "undirected";  // undirected | directed | explicit
    Mat a_explicit;
    std::string b = "identity";        // identity | explicit
    Mat b_explicit;

    struct Pin {  // condition a generated weight before the run
        int i = 0, j = 0;
        double value = 0.0;
        bool mirror = true;
    };
    std::vector<Pin> pins;

    struct Event {  // step change at a point in time
        double time = 0.0;
        int i = 0, j = 0;
        double value = 0.0;
        bool mirror = true;
    };
    std::vector<Event> events;

    struct Override {  // smooth weight trajectory, kind: cos2 -> amp*cos^2(2*pi*t/period)
        int i = 0, j = 0;
        std::string kind = "cos2";
        double amplitude = 0.56;
        double period = 800.0;
        bool mirror = true;
    };
    std::vector<Override> overrides;
};

struct ReferenceSpec {
    std::string a_m = "neg-identity";  // neg-identity | neg-laplacian-random | explicit
    Mat a_m_explicit;
    double pole = -1.0;

    struct Signal {
        std::string kind = "pe-bank";  // pe-bank | structured | synchronized | step | zero
        double w0 = 1.0;               // structured bank base frequency
        double step_level = 1.0;
    };
    Signal signal;
};

struct AdaptiveSpec {
    double w_scale = 10.0;          // W = w_scale * I
    std::string mode = "plain";     // plain | sliding
};

struct SlidingSpec {
    double epsilon = 0.1;
    double delta = 1e-3;
    std::string rho = "auto";       // auto | fixed
    double rho_value = 1.0;
};

struct DisturbanceSpec {
    std::string kind = "none";      // none | truncated-gauss | uniform
    double sigma = 1.0;
    double bound = 3.0;
    double lo = -1.0;
    double hi = 1.0;
};

struct InitSpec {
    std::string x0 = "gauss";       // gauss | zero
    std::string xm0 = "zero";       // zero | copy-x0
    std::string k0 = "zero";        // zero | matched
};

struct MetricsSpec {
    bool topology = true;
    bool tracking = true;
    bool dispersion = false;
    bool ramp = false;              // deviation from the unit ramp x_i(t) - t
    bool pe = true;
    bool lyapunov = true;
    std::vector<std::array<int, 2>> links{{0, 1}};  // monitored links

    bool detect = false;
    double detect_threshold = 0.2;
    int detect_dwell = 50;            // samples on the decimated grid
    int detect_median_window = 25001; // 250 time units at the default grid; the
                                      // median must outlast the re-adaptation
                                      // transient for a slow estimate decay to
                                      // build a detectable deviation
    double detect_warmup = -1.0;      // < 0: defaults to 20% of horizon

    double pe_window = 0.0;         // 0: bank -> 2*pi/min frequency, else 10
    double pe_alpha = 0.01;
};

struct ExportSpec {
    std::vector<std::string> figures;  // fig1..fig8 data files to emit
};

struct Scenario {
    std::string name = "custom";
    std::string description;
    std::uint64_t seed = 1;
    double horizon = 500.0;
    double dt = 1e-3;
    int decimation = 10;

    PlantSpec plant;
    ReferenceSpec reference;
    AdaptiveSpec adaptive;
    SlidingSpec sliding;
    DisturbanceSpec disturbance;
    InitSpec init;
    MetricsSpec metrics;
    ExportSpec exports;
};

/// Concrete systems realized from a Scenario. Seed-splitting is fixed:
/// child 0 -> plant graph, 1 -> x(0), 2 -> reference (graph, then signal),
/// 3 -> disturbance realization.
struct BuiltScenario {
    NetworkSystem plant;
    ReferenceModel ref;
    AdaptiveConfig cfg;
    std::optional<SlidingConfig> scfg;
    RunOptions opt;
    RngStream run_rng;  // consumed by the disturbance realization

    BuiltScenario() : run_rng(0) {}
};

/// Validate the spec and realize every component without running anything.
BuiltScenario build_scenario(const Scenario& sc);

// ---- catalog ----------------------------------------------------------

Scenario scenario_baseline(std::uint64_t seed);
Scenario scenario_link_failure(std::uint64_t seed, double t_fail = 1000.0,
                               std::array<int, 2> link = {0, 1});
Scenario scenario_time_varying(std::uint64_t seed);
Scenario scenario_disturbance(std::uint64_t seed, bool robust);
Scenario scenario_tracking(std::uint64_t seed);
Scenario scenario_synchronization(std::uint64_t seed);
Scenario scenario_unidentifiable(std::uint64_t seed);

struct CatalogEntry {
    std::string name;
    std::string description;
    std::string figure;  // data-file tag(s) this scenario can emit
};
const std::vector<CatalogEntry>& scenario_catalog();

/// Build a catalog scenario by name; throws ArgumentError for unknown names.
Scenario make_scenario(const std::string& name, std::uint64_t seed);

}  // namespace netid
