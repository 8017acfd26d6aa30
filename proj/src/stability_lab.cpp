#include "fraclab/stability_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "fraclab/errors.hpp"
#include "fraclab/parallel.hpp"

namespace fraclab {

namespace {

struct LevelRun {
    Domain domain;
    Vector u;
    Vector potential;
};

std::vector<double> atom_locations(const MeasureSpec& spec) {
    std::vector<double> out;
    for (const auto& a : spec.atoms)
        if (a.mass != 0.0) out.push_back(a.location);
    return out;
}

bool excluded(double x, const std::vector<double>& atoms, double radius) {
    return std::any_of(atoms.begin(), atoms.end(), [&](double c) { return std::abs(x - c) <= radius; });
}

// sup and h-weighted L1 of u - ref over nodes farther than `radius` from every atom
struct Trimmed {
    double sup = 0.0;
    double l1 = 0.0;
};

Trimmed trimmed_difference(const Domain& d, const Vector& u, const Domain* ref_domain, const Vector* ref,
                           const std::vector<double>& atoms, double radius) {
    Trimmed t;
    for (std::size_t i = 0; i < d.n_interior; ++i) {
        const double x = d.node(i);
        const double r = ref ? interpolate(*ref_domain, *ref, x) : 0.0;
        const double diff = std::abs(u[static_cast<Eigen::Index>(i)] - r);
        t.l1 += d.h * diff;
        if (!excluded(x, atoms, radius)) t.sup = std::max(t.sup, diff);
    }
    return t;
}

double exclusion_radius(const RefinementSchedule& s, const StabilityThresholds& thr) {
    return thr.exclusion_radius > 0.0 ? thr.exclusion_radius : 2.0 * s.levels().front().epsilon;
}

void require_levels(const RefinementSchedule& s, const StabilityThresholds& thr) {
    if (s.size() < thr.min_levels) {
        std::ostringstream os;
        os << "schedule has " << s.size() << " levels, the trend rule needs " << thr.min_levels;
        throw ScheduleError(os.str());
    }
}

LevelRun solve_on(const Domain& d, FractionalOrder alpha, const GridMeasure& mu, const Nonlinearity& g,
                  const SolverConfig& cfg) {
    const auto op = DirichletOperator::assemble(d, alpha);
    LevelRun run{d, solve_singular(op, mu, g, cfg).u, solve_linear(op, mu).u};
    return run;
}

// Shared driver for the experiments that compare against a reference
// solution on the finest schedule grid.
StabilityReport run_against_reference(const std::string& name, FractionalOrder alpha, const Nonlinearity& g,
                                      const std::function<GridMeasure(const Domain&, double)>& level_measure,
                                      const MeasureSpec& reference, const std::vector<double>& atoms,
                                      const RefinementSchedule& schedule, const SolverConfig& cfg,
                                      const StabilityThresholds& thr) {
    require_levels(schedule, thr);
    const std::size_t K = schedule.size();
    const Domain fine = schedule.domain(K - 1);
    auto runs = parallel_map<LevelRun>(K + 1, [&](std::size_t k) {
        if (k == K) return solve_on(fine, alpha, discretize(reference, fine), g, cfg);
        const Domain d = schedule.domain(k);
        return solve_on(d, alpha, level_measure(d, schedule.levels()[k].epsilon), g, cfg);
    });
    const LevelRun& ref = runs[K];

    StabilityReport rep;
    rep.experiment = name;
    rep.exclusion_radius = exclusion_radius(schedule, thr);
    std::vector<double> distances;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& run = runs[k];
        const double eps = schedule.levels()[k].epsilon;
        StabilityLevel lv;
        lv.level = k;
        lv.n = schedule.levels()[k].n;
        lv.epsilon = eps;
        const Trimmed t = trimmed_difference(run.domain, run.u, &ref.domain, &ref.u, atoms, rep.exclusion_radius);
        lv.distance = t.sup;
        lv.l1 = t.l1;
        lv.shrinking_distance =
            trimmed_difference(run.domain, run.u, &ref.domain, &ref.u, atoms, 2.0 * eps).sup;
        lv.potential_distance =
            trimmed_difference(run.domain, run.potential, &ref.domain, &ref.potential, atoms, rep.exclusion_radius)
                .sup;
        lv.max_u = run.u.maxCoeff();
        lv.far_field = trimmed_difference(run.domain, run.u, nullptr, nullptr, atoms, rep.exclusion_radius).sup;
        distances.push_back(lv.distance);
        rep.levels.push_back(lv);
    }
    rep.pass = distances.size() >= thr.min_levels && strictly_decreasing(distances);
    rep.verdict = rep.pass ? "pass" : "fail";
    return rep;
}

}  // namespace

RefinementSchedule::RefinementSchedule(std::vector<ScheduleLevel> levels, double a, double b)
    : levels_(std::move(levels)), a_(a), b_(b) {
    if (levels_.empty()) throw ScheduleError("refinement schedule is empty");
    if (!(b_ > a_)) throw ScheduleError("refinement schedule needs a < b");
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        const auto& lv = levels_[k];
        const Domain d = Domain::make(a_, b_, lv.n);
        if (!(lv.epsilon >= 4.0 * d.h)) {
            std::ostringstream os;
            os << "level " << k << ": epsilon " << lv.epsilon << " is below 4h = " << 4.0 * d.h;
            throw ScheduleError(os.str());
        }
        if (k > 0 && lv.n <= levels_[k - 1].n) throw ScheduleError("grid sizes must strictly increase");
        if (k > 0 && lv.epsilon >= levels_[k - 1].epsilon) throw ScheduleError("epsilon must strictly decrease");
    }
}

RefinementSchedule RefinementSchedule::sqrt_rule(const std::vector<std::size_t>& sizes, double factor, double a,
                                                 double b) {
    std::vector<ScheduleLevel> levels;
    for (std::size_t n : sizes) {
        const double h = (b - a) / static_cast<double>(n + 1);
        levels.push_back({n, factor * std::sqrt(h)});
    }
    return RefinementSchedule(std::move(levels), a, b);
}

bool strictly_decreasing(const std::vector<double>& values) {
    for (std::size_t k = 1; k < values.size(); ++k)
        if (!(values[k] < values[k - 1])) return false;
    return true;
}

double potential_sup_distance(const DirichletOperator& op, const GridMeasure& mu1, const GridMeasure& mu2) {
    if (!mu1.domain.same_grid(mu2.domain)) throw ShapeError("potential_sup_distance: measures on different grids");
    return (solve_linear(op, mu1).u - solve_linear(op, mu2).u).cwiseAbs().maxCoeff();
}

double green_sup_scale(const DirichletOperator& op) {
    const auto N = static_cast<Eigen::Index>(op.size());
    double best = 0.0;
    for (Eigen::Index j = 0; j < N; ++j) best = std::max(best, op.solve(Vector::Unit(N, j)).maxCoeff());
    return best / op.domain().h;
}

StabilityReport run_tv_stability(const DirichletOperator& op, const Nonlinearity& g, const GridMeasure& mu,
                                 const std::vector<GridMeasure>& perturbations, const SolverConfig& cfg,
                                 const StabilityThresholds& thr) {
    if (perturbations.empty()) throw ParameterError("run_tv_stability: no perturbations");
    for (const auto& p : perturbations) {
        if (!p.domain.same_grid(op.domain())) throw ShapeError("run_tv_stability: perturbation on another grid");
        if (!p.nonnegative() || p.trivial())
            throw ParameterError("run_tv_stability: perturbations must be nonnegative and nontrivial");
    }
    const std::size_t K = perturbations.size();
    auto sols = parallel_map<Solution>(K + 1, [&](std::size_t k) {
        return solve_singular(op, k == K ? mu : perturbations[k], g, cfg);
    });
    std::int64_t level = 0;
    for (const auto& s : sols) level = std::max(level, s.last_level);
    sols = parallel_map<Solution>(K + 1, [&](std::size_t k) {
        return continue_to_level(sols[k], op, k == K ? mu : perturbations[k], g, level, cfg);
    });
    const Vector& base = sols[K].u;
    const Vector base_potential = solve_linear(op, mu).u;
    const double scale = base_potential.maxCoeff() / mu.tv_norm();

    StabilityReport rep;
    rep.experiment = "tv";
    std::vector<double> distances;
    for (std::size_t k = 0; k < K; ++k) {
        StabilityLevel lv;
        lv.level = k;
        lv.n = op.size();
        lv.distance = (sols[k].u - base).cwiseAbs().maxCoeff();
        lv.potential_distance = (solve_linear(op, perturbations[k]).u - base_potential).cwiseAbs().maxCoeff();
        lv.tv_distance = (perturbations[k] - mu).tv_norm();
        lv.max_u = sols[k].u.maxCoeff();
        lv.far_field = lv.max_u;
        lv.l1 = op.domain().h * (sols[k].u - base).cwiseAbs().sum();
        distances.push_back(lv.distance);
        rep.levels.push_back(lv);
    }
    bool trend = true;
    for (std::size_t k = 2; k < distances.size(); ++k)
        if (distances[k] > distances[k - 1]) trend = false;
    const auto& last = rep.levels.back();
    rep.pass = trend && last.distance <= thr.tv_factor * last.tv_distance * scale;
    rep.verdict = rep.pass ? "pass" : "fail";
    return rep;
}

StabilityReport run_vanishing(FractionalOrder alpha, const Nonlinearity& g, const MeasureSpec& atoms,
                              const RefinementSchedule& schedule, const SolverConfig& cfg,
                              const StabilityThresholds& thr) {
    if (atoms.has_density()) throw ParameterError("run_vanishing: data must consist of atoms only");
    require_levels(schedule, thr);
    const auto centers = atom_locations(atoms);
    const std::size_t K = schedule.size();
    auto runs = parallel_map<LevelRun>(K, [&](std::size_t k) {
        const Domain d = schedule.domain(k);
        return solve_on(d, alpha, mollify(atoms, schedule.levels()[k].epsilon, d).measure, g, cfg);
    });

    StabilityReport rep;
    rep.experiment = "vanishing";
    rep.exclusion_radius = exclusion_radius(schedule, thr);
    std::vector<double> maxima;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& run = runs[k];
        StabilityLevel lv;
        lv.level = k;
        lv.n = schedule.levels()[k].n;
        lv.epsilon = schedule.levels()[k].epsilon;
        lv.max_u = run.u.maxCoeff();
        lv.distance = lv.max_u;
        lv.potential_distance = run.potential.maxCoeff();
        const Trimmed fixed = trimmed_difference(run.domain, run.u, nullptr, nullptr, centers, rep.exclusion_radius);
        lv.far_field = fixed.sup;
        lv.l1 = fixed.l1;
        lv.shrinking_distance =
            trimmed_difference(run.domain, run.u, nullptr, nullptr, centers, 2.0 * lv.epsilon).sup;
        maxima.push_back(lv.max_u);
        rep.levels.push_back(lv);
    }
    rep.pass = maxima.size() >= thr.min_levels && strictly_decreasing(maxima) &&
               maxima.back() <= thr.vanishing_ratio * maxima.front();
    rep.verdict = rep.pass ? "vanishing" : "not vanishing";
    return rep;
}

StabilityReport run_mollification_split(FractionalOrder alpha, const Nonlinearity& g, const MeasureSpec& mixed,
                                        const RefinementSchedule& schedule, const SolverConfig& cfg,
                                        const StabilityThresholds& thr) {
    const auto [diffuse, concentrated] = decompose(mixed, alpha);
    if (!mixed.has_density()) throw ParameterError("run_mollification_split: data needs a density part");
    if (mixed.has_atoms() && !points_are_polar(alpha))
        throw ParameterError("run_mollification_split: atoms must be concentrated (alpha <= 1)");
    return run_against_reference(
        "mollification_split", alpha, g,
        [&](const Domain& d, double eps) { return mollify(mixed, eps, d).measure; }, diffuse,
        atom_locations(concentrated), schedule, cfg, thr);
}

StabilityReport run_additive_perturbation(FractionalOrder alpha, const Nonlinearity& g, const MeasureSpec& nu,
                                          const MeasureSpec& singular, const RefinementSchedule& schedule,
                                          const SolverConfig& cfg, const StabilityThresholds& thr) {
    if (!g.monotone()) throw ParameterError("run_additive_perturbation: g must be nonincreasing");
    if (!nu.has_density() || !decompose(nu, alpha).second.trivial())
        throw ParameterError("run_additive_perturbation: nu must be nontrivial and diffuse");
    return run_against_reference(
        "additive_perturbation", alpha, g,
        [&](const Domain& d, double eps) { return discretize(nu, d) + mollify(singular, eps, d).measure; }, nu,
        atom_locations(singular), schedule, cfg, thr);
}

}  // namespace fraclab
