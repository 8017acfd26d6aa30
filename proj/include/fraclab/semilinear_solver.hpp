#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fraclab/grid_operator.hpp"
#include "fraclab/measures.hpp"
#include "fraclab/nonlinearity.hpp"
#include "fraclab/solution.hpp"

namespace fraclab {

struct SolverConfig {
    double inner_tol = 1e-11;       // relative fixed-point residual, in units of ‖q‖∞
    int max_inner_iters = 5000;
    std::vector<std::int64_t> levels = doubling_levels(1, std::int64_t{1} << 26);
    double outer_tol = 1e-6;        // Cauchy test, relative to ‖u‖∞
    bool run_all_levels = false;    // keep refining after the Cauchy test passes

    void validate() const;
    static std::vector<std::int64_t> doubling_levels(std::int64_t first, std::int64_t last);
};

/// Solves L u = g(u + 1/n) q for one regularization level n.
///
/// Starting from `initial` (zero when absent), iterates the antitone map
/// T(u) = L⁻¹(g(u + 1/n) q) with relaxation u ← (1-θ)u + θ T(u). The
/// relaxation starts at θ = 2/(2+γ) for monotone g (the map's derivative
/// has spectrum in [-γ, 0] at the fixed point). Non-monotone g starts at
/// 1/(1+γ) and halves θ whenever the residual grows.
Solution solve_regularized(const DirichletOperator& op, const GridMeasure& mu, const Nonlinearity& g,
                           std::int64_t n, const SolverConfig& cfg,
                           const std::optional<Vector>& initial = std::nullopt);

/// Regularize-then-limit: solves every level of cfg.levels, warm-starting
/// from the previous one, and stops once sup |u_n - u_prev| <= outer_tol ‖u_n‖∞.
Solution solve_singular(const DirichletOperator& op, const GridMeasure& mu, const Nonlinearity& g,
                        const SolverConfig& cfg);

/// Continues a solve_singular result through every configured level up to
/// and including `target_level`.
Solution continue_to_level(const Solution& start, const DirichletOperator& op, const GridMeasure& mu,
                           const Nonlinearity& g, std::int64_t target_level, const SolverConfig& cfg);

/// The first `count` undamped map iterates from u⁰ = 0 (u⁰ included).
std::vector<Vector> picard_iterates(const DirichletOperator& op, const GridMeasure& mu, const Nonlinearity& g,
                                    std::int64_t n, int count);

struct PowerBracket {
    Solution lower;  // -A v = c1 v^{-γ} μ
    Solution upper;  // -A w = c2 w^{-γ} μ
};

// Both solutions are carried to the same final regularization level.
PowerBracket power_bracket(const DirichletOperator& op, const GridMeasure& mu, double gamma, double c1,
                           double c2, const SolverConfig& cfg);

struct MixedSolution {
    Solution u;           // -A u = (g(u) + h(u)) μ
    Solution v;           // -A v = c1 v^{-γ} μ
    Solution w;           // -A w = c1 w^{-β} μ
    Vector bound;         // (c2/c1)(2^γ v + 2^β w)
    double bound_slack = 0.0;  // min over nodes of bound - u
    bool bound_holds = false;  // slack >= -1e-8
};

MixedSolution solve_mixed(const DirichletOperator& op, const GridMeasure& mu, const Nonlinearity& g,
                          const Nonlinearity& h, const SolverConfig& cfg);

struct ComparisonReport {
    double max_violation = 0.0;  // max (u1 - u2)⁺
    bool pass = false;           // violation <= 1e-10
};

ComparisonReport comparison_check(const Solution& u1, const Solution& u2);

struct SupBoundReport {
    double max_u = 0.0;
    double bound = 0.0;  // (c2 (γ+1) ‖Rμ‖∞)^{1/(γ+1)}
    double slack = 0.0;
    bool pass = false;
};

SupBoundReport verify_sup_bound(const Solution& u, const DirichletOperator& op, const GridMeasure& mu,
                                double gamma, double c2);

struct EnergyBoundReport {
    double energy = 0.0;  // E(u^{(γ+1)/2}, u^{(γ+1)/2})
    double tv = 0.0;
    double ratio = 0.0;   // energy / (c2 tv)
};

EnergyBoundReport verify_energy_bound(const Vector& u, const DirichletOperator& op, const GridMeasure& mu,
                                      double gamma, double c2 = 1.0);

}  // namespace fraclab
