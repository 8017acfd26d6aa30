#include "fraclab/semilinear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

// Sum of one or two nonlinearities evaluated at u + 1/n.
class Reaction {
public:
    explicit Reaction(const Nonlinearity& g) : terms_{g} {}
    Reaction(const Nonlinearity& g, const Nonlinearity& h) : terms_{g, h} {}

    double operator()(double u) const {
        double s = 0.0;
        for (const auto& t : terms_) s += t(u);
        return s;
    }
    bool monotone() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const Nonlinearity& t) { return t.monotone(); });
    }
    double max_exponent() const {
        double e = 0.0;
        for (const auto& t : terms_) e = std::max(e, t.gamma());
        return e;
    }

private:
    std::vector<Nonlinearity> terms_;
};

Vector source(const Reaction& g, const Vector& u, const Vector& q, double shift) {
    Vector b(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) b[i] = q[i] == 0.0 ? 0.0 : g(u[i] + shift) * q[i];
    return b;
}

double derivative(const Reaction& g, double v) {
    const double d = 1e-6 * v;
    return (g(v + d) - g(v - d)) / (2.0 * d);
}

// Damped Newton on L u - q g(u + shift) = 0 from u. Returns true and
// updates u when the residual reaches the tolerance.
template <class Tolerance>
bool newton_polish(const DirichletOperator& op, const Reaction& g, const Vector& q, double shift, Vector& u,
                   int max_steps, Tolerance tolerance) {
    const double qnorm = q.cwiseAbs().maxCoeff();
    Vector x = u;
    Vector b = source(g, x, q, shift);
    Vector F = op.apply(x) - b;
    double r = F.cwiseAbs().maxCoeff() / qnorm;
    for (int k = 0; k <= max_steps; ++k) {
        if (r <= tolerance(x, b)) {
            u = std::move(x);
            return true;
        }
        if (k == max_steps) break;
        Eigen::MatrixXd J = op.matrix();
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (q[i] != 0.0) J(i, i) -= q[i] * derivative(g, x[i] + shift);
        const Vector dx = J.partialPivLu().solve(-F);
        if (!dx.allFinite()) return false;
        bool moved = false;
        for (double step = 1.0; step > 1e-6; step *= 0.5) {
            Vector y = x + step * dx;
            if (y.minCoeff() + shift <= 0.0) continue;
            Vector by = source(g, y, q, shift);
            Vector Fy = op.apply(y) - by;
            const double ry = Fy.cwiseAbs().maxCoeff() / qnorm;
            if (ry < r) {
                x = std::move(y);
                b = std::move(by);
                F = std::move(Fy);
                r = ry;
                moved = true;
                break;
            }
        }
        if (!moved) return false;
    }
    return false;
}

void check_data(const DirichletOperator& op, const GridMeasure& mu) {
    if (!mu.domain.same_grid(op.domain())) throw ShapeError("measure lives on a different grid than the operator");
    if (!mu.nonnegative()) throw ParameterError("equation data must be a nonnegative measure");
    if (mu.trivial()) throw ParameterError("equation data must be a nontrivial measure");
}

Solution solve_level(const DirichletOperator& op, const GridMeasure& mu, const Reaction& g, std::int64_t n,
                     const SolverConfig& cfg, const std::optional<Vector>& initial) {
    if (n < 1) throw ParameterError("regularization level must be >= 1");
    const Vector q = mu.density();
    const double qnorm = q.cwiseAbs().maxCoeff();
    const double shift = 1.0 / static_cast<double>(n);
    const auto N = static_cast<Eigen::Index>(op.size());

    Vector u = initial ? *initial : Vector::Zero(N);
    if (u.size() != N) throw ShapeError("initial iterate length does not match the grid");
    if (u.minCoeff() < 0.0) throw ParameterError("initial iterate must be nonnegative");
    Vector Lu = initial ? op.apply(u) : Vector::Zero(N);
    Vector b = source(g, u, q, shift);
    auto residual_of = [&](const Vector& lu, const Vector& src) { return (lu - src).cwiseAbs().maxCoeff() / qnorm; };
    // acceptance threshold: inner_tol plus the rounding floor of L u and of the source
    auto tolerance = [&](const Vector& v, const Vector& src) {
        return cfg.inner_tol +
               (op.rounding_floor(v.cwiseAbs().maxCoeff()) + 1e-14 * src.cwiseAbs().maxCoeff()) / qnorm;
    };
    double r = residual_of(Lu, b);

    const double gamma = g.max_exponent();
    const double theta0 = g.monotone() ? 2.0 / (2.0 + gamma) : 1.0 / (1.0 + gamma);
    double theta = theta0;
    int streak = 0;
    int it = 0;
    for (; it < cfg.max_inner_iters; ++it) {
        if (r <= tolerance(u, b)) {
            // confirm against a fresh product; the tracked L u drifts by rounding
            Lu = op.apply(u);
            r = residual_of(Lu, b);
            if (r <= tolerance(u, b)) break;
        }
        const Vector t = op.solve(b, false);
        Vector u_next = (1.0 - theta) * u + theta * t;
        Vector Lu_next = (1.0 - theta) * Lu + theta * b;
        Vector b_next = source(g, u_next, q, shift);
        const double r_next = residual_of(Lu_next, b_next);
        // monotone g: fixed relaxation (a contraction near the fixed point);
        // otherwise halve θ whenever the residual grows
        if (!g.monotone() && !(r_next <= r) && it > 0) {
            theta *= 0.5;
            streak = 0;
            if (theta < 1e-10) break;
            continue;
        }
        u = std::move(u_next);
        Lu = std::move(Lu_next);
        b = std::move(b_next);
        r = r_next;
        if (++streak >= 4 && theta < theta0) {
            theta = std::min(theta0, 2.0 * theta);
            streak = 0;
        }
        if (it % 64 == 63) Lu = op.apply(u), r = residual_of(Lu, b);
    }
    if (!(r <= tolerance(u, b))) {
        // repelling fixed points of a non-monotone g: finish with Newton
        const auto tol = [&](const Vector& v, const Vector& src) { return tolerance(v, src); };
        if (newton_polish(op, g, q, shift, u, std::min(60, cfg.max_inner_iters), tol)) {
            Lu = op.apply(u);
            b = source(g, u, q, shift);
            r = residual_of(Lu, b);
        }
    }
    if (!(r <= tolerance(u, b))) {
        const Vector t = op.solve(b);
        const double gap = (t - u).cwiseAbs().maxCoeff();
        std::ostringstream os;
        os << "fixed-point iteration at level n=" << n << " did not converge in " << it
           << " iterations (residual " << r << ", gap " << gap << ")";
        throw NonConvergenceError(os.str(), gap);
    }

    Solution sol;
    sol.domain = op.domain();
    sol.u = std::move(u);
    sol.residual = r;
    sol.bracket_gap = (op.solve(b) - sol.u).cwiseAbs().maxCoeff();
    sol.iterations = it;
    sol.last_level = n;
    sol.levels = {n};
    sol.possibly_nonunique = !g.monotone();
    return sol;
}

Solution run_levels(const DirichletOperator& op, const GridMeasure& mu, const Reaction& g, const SolverConfig& cfg,
                    const Solution* start, std::int64_t stop_level) {
    cfg.validate();
    check_data(op, mu);
    Solution current;
    bool have = false;
    std::vector<double> trace;
    std::vector<std::int64_t> visited;
    int iterations = 0;
    if (start) {
        current = *start;
        have = true;
        trace = start->level_trace;
        visited = start->levels;
        iterations = start->iterations;
    }
    const bool targeted = stop_level > 0;
    for (std::int64_t n : cfg.levels) {
        if (have && n <= current.last_level) continue;
        if (targeted && n > stop_level) break;
        Solution next = solve_level(op, mu, g, n, cfg, have ? std::optional<Vector>(current.u) : std::nullopt);
        iterations += next.iterations;
        visited.push_back(n);
        if (have) {
            const double diff = (next.u - current.u).cwiseAbs().maxCoeff();
            trace.push_back(diff);
            current = std::move(next);
            if (!targeted && !cfg.run_all_levels && diff <= cfg.outer_tol * current.u.cwiseAbs().maxCoeff()) break;
        } else {
            current = std::move(next);
            have = true;
        }
    }
    if (!have) throw NonConvergenceError("no regularization level was solved", 0.0);
    current.level_trace = trace;
    current.levels = visited;
    current.iterations = iterations;
    if (!targeted) {
        const double last = trace.empty() ? INFINITY : trace.back();
        if (!(last <= cfg.outer_tol * current.u.cwiseAbs().maxCoeff())) {
            std::ostringstream os;
            os << "regularization levels exhausted at n=" << current.last_level << " without meeting the Cauchy test"
               << " (last difference " << last << ")";
            throw NonConvergenceError(os.str(), last, trace);
        }
    } else if (current.last_level != stop_level) {
        throw ParameterError("target level is not part of the configured level schedule");
    }
    return current;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(inner_tol > 0.0)) throw ParameterError("inner_tol must be positive");
    if (!(outer_tol > 0.0)) throw ParameterError("outer_tol must be positive");
    if (max_inner_iters < 1) throw ParameterError("max_inner_iters must be positive");
    if (levels.empty()) throw ParameterError("at least one regularization level is required");
    if (levels.front() < 1) throw ParameterError("regularization levels must be >= 1");
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (levels[k] <= levels[k - 1]) throw ParameterError("regularization levels must be strictly increasing");
}

std::vector<std::int64_t> SolverConfig::doubling_levels(std::int64_t first, std::int64_t last) {
    std::vector<std::int64_t> out;
    for (std::int64_t n = first; n <= last; n *= 2) out.push_back(n);
    return out;
}

Solution solve_regularized(const DirichletOperator& op, const GridMeasure& mu, const Nonlinearity& g,
                           std::int64_t n, const SolverConfig& cfg, const std::optional<Vector>& initial) {
    cfg.validate();
    check_data(op, mu);
    return solve_level(op, mu, Reaction(g), n, cfg, initial);
}

Solution solve_singular(const DirichletOperator& op, const GridMeasure& mu, const Nonlinearity& g,
                        const SolverConfig& cfg) {
    return run_levels(op, mu, Reaction(g), cfg, nullptr, 0);
}

Solution continue_to_level(const Solution& start, const DirichletOperator& op, const GridMeasure& mu,
                           const Nonlinearity& g, std::int64_t target_level, const SolverConfig& cfg) {
    if (start.last_level >= target_level) return start;
    return run_levels(op, mu, Reaction(g), cfg, &start, target_level);
}

std::vector<Vector> picard_iterates(const DirichletOperator& op, const GridMeasure& mu, const Nonlinearity& g,
                                    std::int64_t n, int count) {
    check_data(op, mu);
    const Reaction r(g);
    const Vector q = mu.density();
    const double shift = 1.0 / static_cast<double>(n);
    if (count < 1) throw ParameterError("picard_iterates needs count >= 1");
    std::vector<Vector> out{Vector::Zero(static_cast<Eigen::Index>(op.size()))};
    for (int k = 1; k < count; ++k) out.push_back(op.solve(source(r, out.back(), q, shift)));
    return out;
}

PowerBracket power_bracket(const DirichletOperator& op, const GridMeasure& mu, double gamma, double c1, double c2,
                           const SolverConfig& cfg) {
    const Nonlinearity lower_g = Nonlinearity::power(gamma, c1);
    const Nonlinearity upper_g = Nonlinearity::power(gamma, c2);
    PowerBracket out{solve_singular(op, mu, lower_g, cfg), solve_singular(op, mu, upper_g, cfg)};
    const std::int64_t level = std::max(out.lower.last_level, out.upper.last_level);
    out.lower = continue_to_level(out.lower, op, mu, lower_g, level, cfg);
    out.upper = continue_to_level(out.upper, op, mu, upper_g, level, cfg);
    return out;
}

MixedSolution solve_mixed(const DirichletOperator& op, const GridMeasure& mu, const Nonlinearity& g,
                          const Nonlinearity& h, const SolverConfig& cfg) {
    const Reaction combined(g, h);
    const double c1 = std::min(g.c1(), h.c1());
    const double c2 = std::max(g.c2(), h.c2());
    const Nonlinearity vg = Nonlinearity::power(g.gamma(), c1);
    const Nonlinearity wg = Nonlinearity::power(h.gamma(), c1);

    MixedSolution out;
    out.u = run_levels(op, mu, combined, cfg, nullptr, 0);
    out.v = solve_singular(op, mu, vg, cfg);
    out.w = solve_singular(op, mu, wg, cfg);
    const std::int64_t level = std::max({out.u.last_level, out.v.last_level, out.w.last_level});
    if (out.u.last_level < level) out.u = run_levels(op, mu, combined, cfg, &out.u, level);
    out.v = continue_to_level(out.v, op, mu, vg, level, cfg);
    out.w = continue_to_level(out.w, op, mu, wg, level, cfg);

    out.bound = (c2 / c1) * (std::pow(2.0, g.gamma()) * out.v.u + std::pow(2.0, h.gamma()) * out.w.u);
    out.bound_slack = (out.bound - out.u.u).minCoeff();
    out.bound_holds = out.bound_slack >= -1e-8;
    return out;
}

ComparisonReport comparison_check(const Solution& u1, const Solution& u2) {
    if (!u1.domain.same_grid(u2.domain) || u1.u.size() != u2.u.size())
        throw ShapeError("comparison_check: solutions live on different grids");
    ComparisonReport rep;
    rep.max_violation = std::max(0.0, (u1.u - u2.u).maxCoeff());
    rep.pass = rep.max_violation <= 1e-10;
    return rep;
}

SupBoundReport verify_sup_bound(const Solution& u, const DirichletOperator& op, const GridMeasure& mu, double gamma,
                                double c2) {
    const Solution potential = solve_linear(op, mu);
    SupBoundReport rep;
    rep.max_u = u.u.maxCoeff();
    rep.bound = std::pow(c2 * (gamma + 1.0) * potential.u.maxCoeff(), 1.0 / (gamma + 1.0));
    rep.slack = rep.bound - rep.max_u;
    rep.pass = rep.max_u <= rep.bound + 1e-8;
    return rep;
}

EnergyBoundReport verify_energy_bound(const Vector& u, const DirichletOperator& op, const GridMeasure& mu,
                                      double gamma, double c2) {
    if (static_cast<std::size_t>(u.size()) != op.size()) throw ShapeError("verify_energy_bound: length mismatch");
    const Vector p = u.cwiseMax(0.0).array().pow(0.5 * (gamma + 1.0)).matrix();
    EnergyBoundReport rep;
    rep.energy = op.energy(p);
    rep.tv = mu.tv_norm();
    rep.ratio = rep.tv > 0.0 ? rep.energy / (c2 * rep.tv) : 0.0;
    return rep;
}

}  // namespace fraclab
