#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fraclab/artifacts.hpp"
#include "fraclab/capacity.hpp"
#include "fraclab/commands.hpp"
#include "fraclab/config.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/feynman_kac.hpp"
#include "fraclab/grid_operator.hpp"
#include "fraclab/semilinear_solver.hpp"
#include "fraclab/stability_lab.hpp"
#include "oracles.hpp"

namespace acceptance {

namespace fs = std::filesystem;
using namespace fraclab;

namespace {

struct Context {
    std::uint64_t seed = 1;
    fs::path config_dir;
    std::vector<fs::path> configs;  // parsed reference configs other than accept.ini
};

// Quantities a criterion computed; written as criterion_NN.csv.
class Record {
public:
    void add(const std::string& name, double value) { rows_.emplace_back(name, format_number(value)); }
    void add(const std::string& name, const std::string& value) { rows_.emplace_back(name, value); }
    CsvTable table() const {
        CsvTable t({"quantity", "value"});
        for (const auto& [k, v] : rows_) t.row({k, v});
        return t;
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

struct Outcome {
    bool pass = false;
    std::string detail;
    Record record;
};

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome(const Context&)> run;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

MeasureSpec lebesgue(double c = 1.0) {
    MeasureSpec m;
    m.densities.push_back(DensityTerm::constant(c));
    return m;
}

MeasureSpec dirac(double x, double mass = 1.0) {
    MeasureSpec m;
    m.atoms.push_back({x, mass});
    return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Solves both problems and carries the earlier one to the later level so
// that the discrete comparison is exact.
std::pair<Solution, Solution> solve_pair(const DirichletOperator& op, const GridMeasure& mu1, const Nonlinearity& g1,
                                         const GridMeasure& mu2, const Nonlinearity& g2, const SolverConfig& cfg) {
    Solution u1 = solve_singular(op, mu1, g1, cfg);
    Solution u2 = solve_singular(op, mu2, g2, cfg);
    const auto level = std::max(u1.last_level, u2.last_level);
    return {continue_to_level(u1, op, mu1, g1, level, cfg), continue_to_level(u2, op, mu2, g2, level, cfg)};
}

Outcome linear_green(const Context&) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::size_t> sizes{64, 128, 256, 512};
    std::vector<double> errors, steps;
    double nodal = 0.0;
    for (std::size_t n : sizes) {
        const Domain d = Domain::make(0.0, 1.0, n);
        const auto op = DirichletOperator::assemble(d, FractionalOrder(2.0));
        const Solution u = solve_linear(op, discretize(lebesgue(), d));
        double err = 0.0;
        // piecewise-linear reconstruction sampled 8 times per cell, boundary cells included
        for (std::size_t j = 0; j <= n; ++j)
            for (int s = 0; s <= 8; ++s) {
                const double x = d.a + (static_cast<double>(j) + s / 8.0) * d.h;
                err = std::max(err, std::abs(u.at(x) - 0.5 * x * (1.0 - x)));
            }
        for (std::size_t i = 0; i < n; ++i) {
            const double x = d.node(i);
            nodal = std::max(nodal, std::abs(u.u[static_cast<Eigen::Index>(i)] - 0.5 * x * (1.0 - x)));
        }
        errors.push_back(err);
        steps.push_back(d.h);
        out.record.add("sup_error_N" + std::to_string(n), err);
    }
    double min_order = INFINITY;
    for (std::size_t k = 1; k < errors.size(); ++k) {
        const double order = std::log(errors[k - 1] / errors[k]) / std::log(steps[k - 1] / steps[k]);
        min_order = std::min(min_order, order);
        out.record.add("order_" + std::to_string(sizes[k - 1]) + "_" + std::to_string(sizes[k]), order);
    }
    const double elapsed = seconds_since(t0);
    out.record.add("nodal_error_max", nodal);
    out.pass = errors.back() <= 1e-4 && min_order >= 1.9 && elapsed < 1.0;
    out.detail = "sup error " + fmt(errors.back()) + " at N=512, min order " + fmt(min_order) + ", " +
                 fmt(elapsed, 3) + " s";
    return out;
}

Outcome getoor(const Context&) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::ostringstream detail;
    for (double alpha : {0.5, 1.0, 1.5}) {
        const Domain d = Domain::make(-1.0, 1.0, 2048);
        const auto op = DirichletOperator::assemble(d, FractionalOrder(alpha));
        Vector v(2048);
        for (std::size_t i = 0; i < 2048; ++i) {
            const double x = d.node(i);
            v[static_cast<Eigen::Index>(i)] = std::pow(1.0 - x * x, 0.5 * alpha);
        }
        const Vector Lv = op.apply(v);
        const double B = oracle::getoor_constant(alpha);
        double rel = 0.0;
        for (std::size_t i = 0; i < 2048; ++i)
            if (std::abs(d.node(i)) <= 0.5) rel = std::max(rel, std::abs(Lv[static_cast<Eigen::Index>(i)] - B) / B);
        worst = std::max(worst, rel);
        out.record.add("relative_error_alpha_" + fmt(alpha), rel);
        detail << "α=" << alpha << ": " << fmt(rel, 3) << "  ";
    }
    const double elapsed = seconds_since(t0);
    out.pass = worst <= 0.05 && elapsed < 5.0;
    out.detail = detail.str() + fmt(elapsed, 3) + " s";
    return out;
}

Outcome comparison(const Context& ctx) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    const SolverConfig cfg;
    const Domain d = Domain::make(0.0, 1.0, 127);
    int violations = 0, trials = 0;
    double worst = 0.0;
    for (double alpha : {0.5, 1.0, 2.0}) {
        const auto op = DirichletOperator::assemble(d, FractionalOrder(alpha));
        for (double gamma : {0.5, 1.0, 2.0}) {
            double cell_worst = 0.0;
            for (int t = 0; t < 20; ++t) {
                MeasureSpec m1;
                m1.densities.push_back(DensityTerm::constant(uniform(0.1, 1.0)));
                m1.densities.emplace_back("bump", std::vector<double>{uniform(0.2, 0.8), uniform(0.05, 0.3),
                                                                      uniform(0.0, 2.0)});
                MeasureSpec extra;
                extra.densities.push_back(DensityTerm::constant(uniform(0.0, 0.5)));
                extra.densities.emplace_back("bump", std::vector<double>{uniform(0.2, 0.8), uniform(0.05, 0.3),
                                                                         uniform(0.0, 2.0)});
                const GridMeasure mu1 = discretize(m1, d);
                const GridMeasure mu2 = mu1 + discretize(extra, d);
                const double c = uniform(0.5, 1.5);
                // g1 <= g2 pointwise with g2 nonincreasing
                const bool oscillating = t % 2 == 1;
                const Nonlinearity g1 =
                    oscillating ? Nonlinearity(NonlinearityKind::oscillating_power, gamma, c, c * uniform(1.0, 2.0), false)
                                : Nonlinearity::power(gamma, c);
                const double top = oscillating ? g1.c2() * uniform(1.0, 1.3) : c * uniform(1.0, 1.5);
                const Nonlinearity g2 =
                    oscillating ? Nonlinearity::power(gamma, top)
                                : Nonlinearity(NonlinearityKind::shifted_power, gamma, top, top * uniform(1.0, 2.0), true);
                const auto [u1, u2] = solve_pair(op, mu1, g1, mu2, g2, cfg);
                const ComparisonReport rep = comparison_check(u1, u2);
                ++trials;
                if (!rep.pass) ++violations;
                cell_worst = std::max(cell_worst, rep.max_violation);
            }
            worst = std::max(worst, cell_worst);
            out.record.add("max_violation_alpha_" + fmt(alpha) + "_gamma_" + fmt(gamma), cell_worst);
        }
    }
    const double elapsed = seconds_since(t0);
    out.record.add("violations", static_cast<double>(violations));
    out.pass = violations == 0 && elapsed < 120.0;
    out.detail = std::to_string(violations) + " violations in " + std::to_string(trials) + " pairs (max " +
                 fmt(worst, 3) + "), " + fmt(elapsed, 3) + " s";
    return out;
}

Outcome regularized_monotonicity(const Context&) {
    Outcome out;
    const Domain d = Domain::make(0.0, 1.0, 127);
    const GridMeasure mu = discretize(lebesgue(), d);
    SolverConfig cfg;
    bool monotone = true, cauchy = true;
    std::vector<std::string> failures;
    for (double alpha : {0.5, 1.0, 2.0}) {
        const auto op = DirichletOperator::assemble(d, FractionalOrder(alpha));
        for (double gamma : {0.5, 1.0, 2.0}) {
            const Nonlinearity g = Nonlinearity::power(gamma);
            std::optional<Vector> prev;
            std::vector<double> diffs;
            double worst_drop = 0.0;
            for (std::int64_t n = 1; n <= 256; n *= 2) {
                const Solution s = solve_regularized(op, mu, g, n, cfg, prev);
                if (prev) {
                    worst_drop = std::max(worst_drop, (*prev - s.u).maxCoeff());
                    diffs.push_back((s.u - *prev).cwiseAbs().maxCoeff());
                }
                prev = s.u;
            }
            bool decreasing = true;
            for (std::size_t k = 1; k < diffs.size(); ++k)
                if (diffs[k] > diffs[k - 1]) decreasing = false;
            const std::string cell = "alpha_" + fmt(alpha) + "_gamma_" + fmt(gamma);
            out.record.add("max_decrease_" + cell, worst_drop);
            for (std::size_t k = 0; k < diffs.size(); ++k)
                out.record.add("sup_diff_" + cell + "_" + std::to_string(k), diffs[k]);
            if (worst_drop > 1e-10) {
                monotone = false;
                failures.push_back("nondecrease fails at α=" + fmt(alpha) + ", γ=" + fmt(gamma));
            }
            if (!decreasing) {
                cauchy = false;
                std::string seq;
                for (double v : diffs) seq += (seq.empty() ? "" : " ") + fmt(v, 6);
                failures.push_back("Cauchy trend fails at α=" + fmt(alpha) + ", γ=" + fmt(gamma) + " (" + seq + ")");
            }
        }
    }
    out.pass = monotone && cauchy;
    if (failures.empty()) {
        out.detail = "u_n nondecreasing and sup differences nonincreasing on all 9 (α, γ) cells";
    } else {
        for (const auto& f : failures) out.detail += (out.detail.empty() ? "" : "; ") + f;
    }
    return out;
}

Outcome singular_oracle(const Context&) {
    Outcome out;
    const double reference = oracle::singular_shooting(1.0).center_value;
    const Domain d = Domain::make(0.0, 1.0, 511);
    const auto op = DirichletOperator::assemble(d, FractionalOrder(2.0));
    const Solution u = solve_singular(op, discretize(lebesgue(), d), Nonlinearity::power(1.0), SolverConfig{});
    const double err = std::abs(u.at(0.5) - reference);
    out.record.add("shooting_reference", reference);
    out.record.add("u_center", u.at(0.5));
    out.record.add("last_level", static_cast<double>(u.last_level));
    out.pass = err <= 1e-3;
    out.detail = "u(0.5) = " + fmt(u.at(0.5), 8) + ", shooting " + fmt(reference, 8) + ", error " + fmt(err, 3);
    return out;
}

Outcome sup_bound(const Context&) {
    Outcome out;
    out.pass = true;
    const Domain d = Domain::make(0.0, 1.0, 511);
    const GridMeasure mu = discretize(lebesgue(), d);
    double min_slack = INFINITY;
    for (double alpha : {1.0, 2.0}) {
        const auto op = DirichletOperator::assemble(d, FractionalOrder(alpha));
        for (double gamma : {0.5, 1.0, 2.0}) {
            const Solution u = solve_singular(op, mu, Nonlinearity::power(gamma), SolverConfig{});
            const SupBoundReport rep = verify_sup_bound(u, op, mu, gamma, 1.0);
            const std::string cell = "alpha_" + fmt(alpha) + "_gamma_" + fmt(gamma);
            out.record.add("max_u_" + cell, rep.max_u);
            out.record.add("bound_" + cell, rep.bound);
            out.pass = out.pass && rep.pass && rep.slack >= 0.0;
            min_slack = std::min(min_slack, rep.slack);
        }
    }
    out.detail = "minimum slack " + fmt(min_slack);
    return out;
}

Outcome energy_bound(const Context&) {
    Outcome out;
    out.pass = true;
    std::ostringstream detail;
    for (double alpha : {1.0, 2.0}) {
        std::vector<double> ratios;
        for (std::size_t n : {128, 256, 512, 1024}) {
            const Domain d = Domain::make(0.0, 1.0, n);
            const auto op = DirichletOperator::assemble(d, FractionalOrder(alpha));
            const GridMeasure mu = discretize(lebesgue(), d);
            const Solution u = solve_singular(op, mu, Nonlinearity::power(1.0), SolverConfig{});
            const double r = verify_energy_bound(u.u, op, mu, 1.0, 1.0).ratio;
            ratios.push_back(r);
            out.record.add("ratio_alpha_" + fmt(alpha) + "_N" + std::to_string(n), r);
        }
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        const double spread = *hi / *lo;
        out.pass = out.pass && std::isfinite(spread) && spread <= 2.0;
        detail << "α=" << alpha << ": ratios " << fmt(*lo) << ".." << fmt(*hi) << " (spread " << fmt(spread) << ")  ";
    }
    out.detail = detail.str();
    return out;
}

Outcome mixed_bound(const Context&) {
    Outcome out;
    const Domain d = Domain::make(0.0, 1.0, 511);
    const auto op = DirichletOperator::assemble(d, FractionalOrder(2.0));
    const MixedSolution m = solve_mixed(op, discretize(lebesgue(), d), Nonlinearity::power(1.0),
                                        Nonlinearity::power(2.0), SolverConfig{});
    out.record.add("max_u", m.u.max());
    out.record.add("min_slack", m.bound_slack);
    out.pass = m.bound_holds;
    out.detail = "min slack of (2v + 4w) - u: " + fmt(m.bound_slack);
    return out;
}

Outcome monte_carlo(const Context& ctx) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const Domain d = Domain::make(0.0, 1.0, 511);
    const auto op = DirichletOperator::assemble(d, FractionalOrder(2.0));
    const Nonlinearity g = Nonlinearity::power(1.0);
    const Solution u = solve_singular(op, discretize(lebesgue(), d), g, SolverConfig{});

    WalkConfig walk;
    walk.dt = 1e-5;
    walk.samples = 200000;
    walk.seed = ctx.seed;
    const double allowance = 1e-3;
    const McReport rep = verify_solution_mc(u, op, g, lebesgue(), {0.25, 0.5, 0.75}, walk, allowance);
    std::ostringstream detail;
    for (const auto& p : rep.points) {
        out.record.add("mc_mean_" + fmt(p.x), p.estimate.mean);
        out.record.add("mc_stderr_" + fmt(p.x), p.estimate.std_error);
        out.record.add("z_" + fmt(p.x), p.z);
        detail << "z(" << p.x << ")=" << fmt(p.z, 3) << " ";
    }
    // exit time at the center, from the same paths
    const Estimate& life = rep.points[1].lifetime;
    const bool life_ok = std::abs(life.mean - 0.125) <= 3.0 * life.std_error + 5e-4;
    out.record.add("exit_time_alpha_2", life.mean);

    WalkConfig cauchy;
    cauchy.dt = 1e-4;
    cauchy.samples = 20000;
    cauchy.seed = ctx.seed;
    const double expected = 1.0 / oracle::getoor_constant(1.0);
    const Estimate e1 =
        sample_occupation(FractionalOrder(1.0), Domain::make(-1.0, 1.0, 1), 0.0, DensityTerm::constant(1.0), cauchy);
    const bool cauchy_ok = e1.valid() && std::abs(e1.mean - expected) <= 3.0 * e1.std_error + 0.02 * expected;
    out.record.add("exit_time_alpha_1", e1.mean);

    const double elapsed = seconds_since(t0);
    out.pass = rep.pass && life_ok && cauchy_ok && elapsed < 120.0;
    detail << "Eζ(α=2)=" << fmt(life.mean, 5) << "±" << fmt(life.std_error, 2) << " Eζ(α=1)=" << fmt(e1.mean, 4)
           << "±" << fmt(e1.std_error, 2) << ", " << fmt(elapsed, 3) << " s";
    out.detail = detail.str();
    return out;
}

Outcome capacity_dichotomy(const Context&) {
    Outcome out;
    const auto local = point_capacity_refinement(FractionalOrder(2.0), 0.5, {255, 511, 1023, 2047});
    double worst = 0.0;
    for (const auto& lv : local) {
        worst = std::max(worst, std::abs(lv.value - 4.0));
        out.record.add("alpha_2_N" + std::to_string(lv.n), lv.value);
    }
    const auto polar = point_capacity_refinement(FractionalOrder(0.5), 0.5, {256, 512, 1024, 2048});
    std::vector<double> values;
    for (const auto& lv : polar) {
        values.push_back(lv.value);
        out.record.add("alpha_0.5_N" + std::to_string(lv.n), lv.value);
    }
    const bool shrinking = strictly_decreasing(values) && values.back() < 0.5 * values.front();
    out.pass = worst <= 1e-8 && shrinking;
    out.detail = "α=2 max |cap - 4| " + fmt(worst, 3) + "; α=0.5 " + fmt(values.front()) + " -> " +
                 fmt(values.back());
    return out;
}

RefinementSchedule standard_schedule() {
    return RefinementSchedule({{256, 0.1}, {512, 0.05}, {1024, 0.025}, {2048, 0.0125}});
}

Outcome vanishing(const Context&) {
    Outcome out;
    const Nonlinearity g = Nonlinearity::power(1.0);
    const auto polar = run_vanishing(FractionalOrder(0.5), g, dirac(0.5), standard_schedule(), SolverConfig{});
    const auto local = run_vanishing(FractionalOrder(2.0), g, dirac(0.5), standard_schedule(), SolverConfig{});
    std::string seq, control;
    for (const auto& lv : polar.levels) {
        out.record.add("max_u_alpha_0.5_N" + std::to_string(lv.n), lv.max_u);
        out.record.add("far_field_alpha_0.5_N" + std::to_string(lv.n), lv.far_field);
        seq += (seq.empty() ? "" : " ") + fmt(lv.max_u);
    }
    for (const auto& lv : local.levels) {
        out.record.add("max_u_alpha_2_N" + std::to_string(lv.n), lv.max_u);
        control += (control.empty() ? "" : " ") + fmt(lv.max_u);
    }
    out.record.add("verdict_alpha_0.5", polar.verdict);
    out.record.add("verdict_alpha_2", local.verdict);
    out.pass = polar.pass && local.verdict == "not vanishing";
    out.detail = "α=0.5 max u " + seq + " [" + polar.verdict + "]; α=2 max u " + control + " [" + local.verdict + "]";
    return out;
}

Outcome diffuse_reduction(const Context&) {
    Outcome out;
    const auto rep = run_mollification_split(FractionalOrder(0.5), Nonlinearity::power(1.0), lebesgue() + dirac(0.5),
                                             standard_schedule(), SolverConfig{});
    std::string seq;
    for (const auto& lv : rep.levels) {
        out.record.add("trimmed_distance_N" + std::to_string(lv.n), lv.distance);
        out.record.add("l1_distance_N" + std::to_string(lv.n), lv.l1);
        seq += (seq.empty() ? "" : " ") + fmt(lv.distance);
    }
    out.pass = rep.pass;
    out.detail = "trimmed distance (|x - 0.5| > " + fmt(rep.exclusion_radius) + ") " + seq;
    return out;
}

Outcome tv_stability(const Context&) {
    Outcome out;
    const Domain d = Domain::make(0.0, 1.0, 511);
    const auto op = DirichletOperator::assemble(d, FractionalOrder(2.0));
    const GridMeasure mu = discretize(lebesgue(), d);
    std::vector<GridMeasure> perturbations;
    for (int k = 1; k <= 64; ++k) perturbations.push_back(mu.scaled(1.0 + 1.0 / k));
    const Nonlinearity g = Nonlinearity::power(1.0);
    const auto rep = run_tv_stability(op, g, mu, perturbations, SolverConfig{});
    std::vector<double> distances;
    for (const auto& lv : rep.levels) distances.push_back(lv.distance);
    const double max_u = solve_singular(op, mu, g, SolverConfig{}).max();
    const double predicted = (std::sqrt(65.0 / 64.0) - 1.0) * max_u;
    const double err = std::abs(distances.back() - predicted);
    out.record.add("final_distance", distances.back());
    out.record.add("predicted", predicted);
    out.record.add("first_distance", distances.front());
    out.pass = strictly_decreasing(distances) && err <= 1e-4 && rep.pass;
    out.detail = "final " + fmt(distances.back(), 6) + " vs scaling " + fmt(predicted, 6) + " (error " + fmt(err, 3) +
                 "), decreasing: " + (strictly_decreasing(distances) ? "yes" : "no");
    return out;
}

std::vector<Criterion> criteria() {
    return {
        {1, "linear Green oracle", linear_green},
        {2, "Getoor consistency", getoor},
        {3, "comparison principle", comparison},
        {4, "regularized monotonicity", regularized_monotonicity},
        {5, "singular solution oracle", singular_oracle},
        {6, "sup bound", sup_bound},
        {7, "energy bound", energy_bound},
        {8, "mixed bound", mixed_bound},
        {9, "Monte Carlo cross-check", monte_carlo},
        {10, "capacity dichotomy", capacity_dichotomy},
        {11, "singular vanishing", vanishing},
        {12, "diffuse-part reduction", diffuse_reduction},
        {13, "TV stability", tv_stability},
    };
}

std::string csv_name(int id) {
    std::ostringstream os;
    os << "criterion_" << (id < 10 ? "0" : "") << id << ".csv";
    return os.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> csv_files(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") out.push_back(e.path().filename());
    std::sort(out.begin(), out.end());
    return out;
}

CriterionResult run_one(const Criterion& c, const Context& ctx, const fs::path& out_dir) {
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Outcome o = c.run(ctx);
        r.pass = o.pass;
        r.detail = o.detail;
        write_atomic(out_dir / csv_name(c.id), o.record.table().str());
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = seconds_since(t0);
    return r;
}

// Re-runs every criterion and every reference config with the same seed and
// compares the CSV bytes against the first run.
CriterionResult determinism(const Context& ctx, const fs::path& out, const std::vector<int>& ran) {
    CriterionResult r;
    r.id = 14;
    r.name = "determinism";
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> mismatches;
    std::size_t compared = 0;
    try {
        const fs::path rerun = out / "rerun";
        for (const auto& c : criteria()) {
            if (std::find(ran.begin(), ran.end(), c.id) == ran.end()) continue;
            run_one(c, ctx, rerun);
            const auto a = out / csv_name(c.id), b = rerun / csv_name(c.id);
            ++compared;
            if (!fs::exists(a) || !fs::exists(b) || slurp(a) != slurp(b)) mismatches.push_back(csv_name(c.id));
        }
        for (const auto& path : ctx.configs) {
            const RunConfig config = load_config(path);
            if (config.command.empty()) continue;
            const fs::path base = out / "determinism" / path.stem();
            run_command(config.command, config, base / "first");
            run_command(config.command, config, base / "second");
            for (const auto& f : csv_files(base / "first")) {
                ++compared;
                if (slurp(base / "first" / f) != slurp(base / "second" / f))
                    mismatches.push_back(path.stem().string() + "/" + f.string());
            }
        }
        r.pass = mismatches.empty() && compared > 0;
        r.detail = std::to_string(compared) + " CSV artifacts compared, " + std::to_string(mismatches.size()) +
                   " differ";
        for (const auto& m : mismatches) r.detail += " " + m;
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace

std::vector<CriterionResult> run(const Options& options, const std::function<void(const CriterionResult&)>& on_result) {
    const fs::path& dir = options.config_dir;
    if (!fs::is_directory(dir)) throw ConfigError("", "acceptance config directory " + dir.string() + " does not exist");
    std::vector<fs::path> inis;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".ini") inis.push_back(e.path());
    std::sort(inis.begin(), inis.end());
    if (inis.empty()) throw ConfigError("", "acceptance config directory " + dir.string() + " contains no .ini files");

    Context ctx;
    ctx.config_dir = dir;
    bool have_main = false;
    for (const auto& p : inis) {
        RunConfig config;
        try {
            config = load_config(p);
        } catch (const ConfigError& e) {
            throw ConfigError(e.key(), p.filename().string() + ": " + e.what());
        }
        if (p.filename() == "accept.ini") {
            have_main = true;
            ctx.seed = config.mc.walk.seed;
        } else {
            ctx.configs.push_back(p);
        }
    }
    if (!have_main) throw ConfigError("", "acceptance config directory needs accept.ini");
    if (options.seed) ctx.seed = *options.seed;

    fs::create_directories(options.out);
    std::vector<CriterionResult> results;
    std::vector<int> ran;
    auto wanted = [&](int id) {
        return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
    };
    for (const auto& c : criteria()) {
        if (!wanted(c.id)) continue;
        results.push_back(run_one(c, ctx, options.out));
        ran.push_back(c.id);
        if (on_result) on_result(results.back());
    }
    if (wanted(14)) {
        results.push_back(determinism(ctx, options.out, ran));
        if (on_result) on_result(results.back());
    }

    nlohmann::ordered_json j;
    j["seed"] = ctx.seed;
    j["pass"] = std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
    j["criteria"] = nlohmann::ordered_json::array();
    for (const auto& r : results)
        j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail},
                                 {"seconds", r.seconds}});
    write_atomic(options.out / "acceptance.json", j.dump(2) + "\n");
    return results;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.pass ? "[PASS] " : "[FAIL] ") << (r.id < 10 ? "0" : "") << r.id << " " << r.name << ": " << r.detail;
    return os.str();
}

}  // namespace acceptance
