#include "fraclab/commands.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "fraclab/capacity.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/feynman_kac.hpp"
#include "fraclab/stability_lab.hpp"

namespace fraclab {

namespace fs = std::filesystem;

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v) { return format_number(v); }

RunSummary start(const std::string& command, const RunConfig& config) {
    RunSummary s;
    s.command = command;
    s.config_echo = echo(config);
    return s;
}

void emit(RunSummary& s, const fs::path& out, const std::string& name, const CsvTable& table) {
    const fs::path path = out / name;
    write_atomic(path, table.str());
    s.artifacts.push_back(path);
}

RunSummary finish(RunSummary s, const fs::path& out, const Stopwatch& clock) {
    s.timings.emplace_back("total", clock.seconds());
    const fs::path path = out / "summary.json";
    s.artifacts.push_back(path);
    write_atomic(path, s.json());
    return s;
}

CsvTable solution_table(const Solution& u) {
    CsvTable t({"x", "u"});
    for (std::size_t i = 0; i < u.domain.n_interior; ++i)
        t.row({num(u.domain.node(i)), num(u.u[static_cast<Eigen::Index>(i)])});
    return t;
}

void add_stability_tables(RunSummary& s, const fs::path& out, const StabilityReport& rep) {
    CsvTable main({"level", "N", "epsilon", "distance", "max_u", "verdict"});
    CsvTable diag({"level", "N", "epsilon", "potential_distance", "tv_distance", "shrinking_distance", "far_field",
                   "l1"});
    for (const auto& lv : rep.levels) {
        main.row({std::to_string(lv.level), std::to_string(lv.n), num(lv.epsilon), num(lv.distance), num(lv.max_u),
                  rep.verdict});
        diag.row({std::to_string(lv.level), std::to_string(lv.n), num(lv.epsilon), num(lv.potential_distance),
                  num(lv.tv_distance), num(lv.shrinking_distance), num(lv.far_field), num(lv.l1)});
    }
    emit(s, out, "stability.csv", main);
    emit(s, out, "stability_diagnostics.csv", diag);
}

}  // namespace

RunSummary cmd_solve(const RunConfig& config, const fs::path& out) {
    Stopwatch clock;
    RunSummary s = start("solve", config);
    const Domain d = config.domain();
    const auto op = DirichletOperator::assemble(d, config.order());
    const MeasureSpec spec = config.measure.spec();
    const GridMeasure mu = discretize(spec, d);
    const Nonlinearity g = config.nonlinearity.g();
    const auto h = config.nonlinearity.h();

    Solution u;
    CsvTable bounds({"check", "value", "bound", "pass"});
    if (h) {
        const MixedSolution m = solve_mixed(op, mu, g, *h, config.solver);
        u = m.u;
        bounds.row({"mixed_bound", num(m.bound_slack), "0", m.bound_holds ? "true" : "false"});
        s.verdicts.push_back({"mixed_bound", m.bound_holds, "min slack " + num(m.bound_slack)});
    } else {
        u = solve_singular(op, mu, g, config.solver);
        const SupBoundReport sup = verify_sup_bound(u, op, mu, g.gamma(), g.c2());
        bounds.row({"sup_bound", num(sup.max_u), num(sup.bound), sup.pass ? "true" : "false"});
        s.verdicts.push_back({"sup_bound", sup.pass, "slack " + num(sup.slack)});
    }
    s.timings.emplace_back("solve", clock.seconds());
    const EnergyBoundReport energy = verify_energy_bound(u.u, op, mu, g.gamma(), g.c2());
    bounds.row({"energy_ratio", num(energy.ratio), "", std::isfinite(energy.ratio) ? "true" : "false"});
    s.verdicts.push_back({"energy_ratio", std::isfinite(energy.ratio), "ratio " + num(energy.ratio)});
    s.verdicts.push_back({"converged", true,
                          "residual " + num(u.residual) + " at level " + std::to_string(u.last_level)});
    emit(s, out, "solution.csv", solution_table(u));
    emit(s, out, "bounds.csv", bounds);
    return finish(std::move(s), out, clock);
}

RunSummary cmd_bracket(const RunConfig& config, const fs::path& out) {
    Stopwatch clock;
    RunSummary s = start("bracket", config);
    const Domain d = config.domain();
    const auto op = DirichletOperator::assemble(d, config.order());
    const GridMeasure mu = discretize(config.measure.spec(), d);
    const Nonlinearity g = config.nonlinearity.g();
    const auto& cfg = config.solver;

    PowerBracket br = power_bracket(op, mu, g.gamma(), g.c1(), g.c2(), cfg);
    Solution u = solve_singular(op, mu, g, cfg);
    const auto level = std::max({br.lower.last_level, br.upper.last_level, u.last_level});
    br.lower = continue_to_level(br.lower, op, mu, Nonlinearity::power(g.gamma(), g.c1()), level, cfg);
    br.upper = continue_to_level(br.upper, op, mu, Nonlinearity::power(g.gamma(), g.c2()), level, cfg);
    u = continue_to_level(u, op, mu, g, level, cfg);

    CsvTable t({"x", "v", "u", "w", "slack"});
    double worst = INFINITY;
    for (std::size_t i = 0; i < d.n_interior; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const double slack = std::min(u.u[k] - br.lower.u[k], br.upper.u[k] - u.u[k]);
        worst = std::min(worst, slack);
        t.row({num(d.node(i)), num(br.lower.u[k]), num(u.u[k]), num(br.upper.u[k]), num(slack)});
    }
    s.verdicts.push_back({"bracket", worst >= -1e-10, "min slack " + num(worst)});
    emit(s, out, "bracket.csv", t);
    return finish(std::move(s), out, clock);
}

RunSummary cmd_capacity(const RunConfig& config, const fs::path& out) {
    Stopwatch clock;
    RunSummary s = start("capacity", config);
    const auto levels =
        point_capacity_refinement(config.order(), config.capacity.x0, config.capacity.sizes, config.a, config.b);
    CsvTable t({"N", "capacity"});
    std::vector<double> values;
    for (const auto& lv : levels) {
        t.row({std::to_string(lv.n), num(lv.value)});
        values.push_back(lv.value);
    }
    const double ratio = values.back() / values.front();
    std::ostringstream detail;
    detail << "final/initial " << num(ratio);
    if (points_are_polar(config.order())) {
        s.verdicts.push_back({"polar_point", strictly_decreasing(values) && ratio < 0.5, detail.str()});
    } else {
        s.verdicts.push_back({"positive_point_capacity", ratio >= 0.8, detail.str()});
    }
    emit(s, out, "capacity.csv", t);
    return finish(std::move(s), out, clock);
}

RunSummary cmd_stability(const RunConfig& config, const fs::path& out) {
    Stopwatch clock;
    RunSummary s = start("stability", config);
    const auto& st = config.stability;
    const MeasureSpec spec = config.measure.spec();
    const Nonlinearity g = config.nonlinearity.g();
    StabilityReport rep;
    if (st.mode == "tv") {
        const Domain d = config.domain();
        const auto op = DirichletOperator::assemble(d, config.order());
        const GridMeasure mu = discretize(spec, d);
        std::vector<GridMeasure> perturbations;
        for (std::size_t k = 1; k <= st.tv_count; ++k) {
            const double w = 1.0 / static_cast<double>(k);
            if (st.tv_perturbation == "scale") {
                perturbations.push_back(mu.scaled(1.0 + w));
            } else {
                MeasureSpec atom;
                atom.atoms.push_back({st.tv_atom, w});
                perturbations.push_back(mu + discretize(atom, d));
            }
        }
        rep = run_tv_stability(op, g, mu, perturbations, config.solver, st.thresholds);
    } else {
        if (config.schedule.empty()) throw ConfigError("schedule.pairs", "required for mode " + st.mode);
        const RefinementSchedule schedule = config.refinement();
        if (st.mode == "vanishing") {
            rep = run_vanishing(config.order(), g, spec, schedule, config.solver, st.thresholds);
        } else if (st.mode == "mollification_split") {
            rep = run_mollification_split(config.order(), g, spec, schedule, config.solver, st.thresholds);
        } else {
            MeasureSpec nu, singular;
            nu.densities = spec.densities;
            singular.atoms = spec.atoms;
            rep = run_additive_perturbation(config.order(), g, nu, singular, schedule, config.solver, st.thresholds);
        }
    }
    s.verdicts.push_back({rep.experiment, rep.pass, rep.verdict});
    add_stability_tables(s, out, rep);
    return finish(std::move(s), out, clock);
}

RunSummary cmd_mc_verify(const RunConfig& config, const fs::path& out) {
    Stopwatch clock;
    RunSummary s = start("mc-verify", config);
    const Domain d = config.domain();
    const auto op = DirichletOperator::assemble(d, config.order());
    const MeasureSpec spec = config.measure.spec();
    if (spec.has_atoms()) throw UnsupportedMeasureError("mc-verify supports density measures only");
    const Nonlinearity g = config.nonlinearity.g();
    const Solution u = solve_singular(op, discretize(spec, d), g, config.solver);
    s.timings.emplace_back("solve", clock.seconds());
    const McReport rep = verify_solution_mc(u, op, g, spec, config.mc.points, config.mc.walk, config.mc.allowance);
    CsvTable t({"x", "u_deterministic", "mc_mean", "mc_stderr", "z", "timeout_fraction"});
    for (const auto& p : rep.points) {
        t.row({num(p.x), num(p.u_deterministic), num(p.estimate.mean), num(p.estimate.std_error), num(p.z),
               num(p.estimate.timeout_fraction)});
        s.verdicts.push_back({"z(" + num(p.x) + ")", p.estimate.valid() && p.z <= 3.0, "z " + num(p.z)});
    }
    emit(s, out, "mc.csv", t);
    return finish(std::move(s), out, clock);
}

RunSummary run_command(const std::string& name, const RunConfig& config, const fs::path& out) {
    if (name == "solve") return cmd_solve(config, out);
    if (name == "bracket") return cmd_bracket(config, out);
    if (name == "capacity") return cmd_capacity(config, out);
    if (name == "stability") return cmd_stability(config, out);
    if (name == "mc-verify") return cmd_mc_verify(config, out);
    throw ConfigError("run.command", "unknown command '" + name + "'");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const NonConvergenceError*>(&e) || dynamic_cast<const NumericError*>(&e))
        return kExitNonConvergence;
    if (dynamic_cast<const Error*>(&e)) return kExitConfig;
    return kExitFailure;
}

}  // namespace fraclab
