#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/feynman_kac.hpp"
#include "fraclab/measures.hpp"
#include "fraclab/nonlinearity.hpp"
#include "fraclab/semilinear_solver.hpp"
#include "fraclab/stability_lab.hpp"

namespace fraclab {

struct NonlinearitySection {
    NonlinearityKind kind = NonlinearityKind::pure_power;
    double gamma = 1.0;
    std::optional<double> beta;  // second exponent of a mixed problem
    double c1 = 1.0;
    double c2 = 1.0;
    bool monotone = true;

    Nonlinearity g() const;
    std::optional<Nonlinearity> h() const;
};

struct MeasureSection {
    std::string density_id = "constant";  // "none" for a purely atomic measure
    std::vector<double> density_params{1.0};
    std::vector<Atom> atoms;

    MeasureSpec spec() const;
};

struct McSection {
    WalkConfig walk;
    std::vector<double> points{0.25, 0.5, 0.75};
    double allowance = 1e-3;
};

struct StabilitySection {
    std::string mode = "tv";  // tv | vanishing | mollification_split | additive_perturbation
    std::size_t tv_count = 64;
    std::string tv_perturbation = "scale";  // scale: (1+1/k)μ; atom: μ + δ_{tv_atom}/k
    double tv_atom = 0.5;
    StabilityThresholds thresholds;
};

struct CapacitySection {
    double x0 = 0.5;
    std::vector<std::size_t> sizes{255, 511, 1023, 2047};
};

/// Everything one CLI run needs. Parsed from an INI file in which every
/// section and key must be known; values are validated against the module
/// contracts at parse time.
struct RunConfig {
    std::string command;  // optional [run] command
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 511;
    double alpha = 2.0;
    NonlinearitySection nonlinearity;
    MeasureSection measure;
    SolverConfig solver;
    McSection mc;
    std::vector<ScheduleLevel> schedule;
    StabilitySection stability;
    CapacitySection capacity;
    std::string output_dir = "out";

    Domain domain() const { return Domain::make(a, b, n); }
    FractionalOrder order() const { return FractionalOrder(alpha); }
    RefinementSchedule refinement() const { return RefinementSchedule(schedule, a, b); }
};

/// Throws ConfigError naming the offending key ("section.key").
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical INI text; parse_config(echo(c)) reproduces c.
std::string echo(const RunConfig& config);

}  // namespace fraclab
