#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fraclab/grid_operator.hpp"
#include "fraclab/measures.hpp"
#include "fraclab/nonlinearity.hpp"
#include "fraclab/semilinear_solver.hpp"

namespace fraclab {

struct ScheduleLevel {
    std::size_t n = 0;     // interior nodes
    double epsilon = 0.0;  // mollification radius
};

/// Joint (h, ε) refinement on a fixed interval: n strictly increasing,
/// ε strictly decreasing, ε >= 4h at every level. Violations raise
/// ScheduleError.
class RefinementSchedule {
public:
    RefinementSchedule(std::vector<ScheduleLevel> levels, double a = 0.0, double b = 1.0);

    // ε_k = factor·h_k^{1/2}.
    static RefinementSchedule sqrt_rule(const std::vector<std::size_t>& sizes, double factor, double a = 0.0,
                                        double b = 1.0);

    const std::vector<ScheduleLevel>& levels() const { return levels_; }
    std::size_t size() const { return levels_.size(); }
    Domain domain(std::size_t k) const { return Domain::make(a_, b_, levels_.at(k).n); }
    double a() const { return a_; }
    double b() const { return b_; }

private:
    std::vector<ScheduleLevel> levels_;
    double a_;
    double b_;
};

struct StabilityThresholds {
    std::size_t min_levels = 4;
    double vanishing_ratio = 0.5;  // final max u must fall below this fraction of the first
    double tv_factor = 10.0;       // final distance <= factor · TV · ‖Rμ‖∞/‖μ‖TV
    // Trimmed distances skip nodes within this distance of an atom. A value
    // <= 0 selects 2ε of the first schedule level, held fixed for all levels.
    double exclusion_radius = 0.0;
};

struct StabilityLevel {
    std::size_t level = 0;
    std::size_t n = 0;
    double epsilon = 0.0;            // 0 when the experiment has no mollification
    double distance = 0.0;           // experiment distance (see each run_*)
    double potential_distance = 0.0; // same distance measured on the linear potentials
    double max_u = 0.0;
    double tv_distance = 0.0;        // run_tv_stability only
    double shrinking_distance = 0.0; // distance trimmed by 2ε of this level
    double far_field = 0.0;          // max u outside the fixed exclusion radius
    double l1 = 0.0;                 // h Σ|u - reference|, or h Σ u without reference
};

struct StabilityReport {
    std::string experiment;
    std::vector<StabilityLevel> levels;
    bool pass = false;
    std::string verdict;
    double exclusion_radius = 0.0;
};

/// ‖Rμ₁ - Rμ₂‖∞ on one grid.
double potential_sup_distance(const DirichletOperator& op, const GridMeasure& mu1, const GridMeasure& mu2);

/// max_{ij} (L⁻¹)_{ij} / h, the sup of the discrete Green kernel. Bounds
/// potential_sup_distance by this scale times the TV distance.
double green_sup_scale(const DirichletOperator& op);

/// Solves with μ and with each perturbation μ_k; distance_k = ‖u_k - u‖∞.
/// Passes when the distances are nonincreasing from the second term on and
/// the last one is at most tv_factor · ‖μ_k - μ‖TV · ‖Rμ‖∞/‖μ‖TV.
StabilityReport run_tv_stability(const DirichletOperator& op, const Nonlinearity& g, const GridMeasure& mu,
                                 const std::vector<GridMeasure>& perturbations, const SolverConfig& cfg,
                                 const StabilityThresholds& thresholds = {});

/// Mollifies the atoms at each level's ε on that level's grid and records
/// max u. Verdict "vanishing" when max u strictly decreases over at least
/// min_levels levels and ends below vanishing_ratio times the first value,
/// "not vanishing" otherwise.
StabilityReport run_vanishing(FractionalOrder alpha, const Nonlinearity& g, const MeasureSpec& atoms,
                              const RefinementSchedule& schedule, const SolverConfig& cfg,
                              const StabilityThresholds& thresholds = {});

/// Solves with j_ε ∗ μ at each level and compares, away from the atoms,
/// with the solution for the diffuse part alone on the finest grid. Passes
/// when the trimmed sup distances strictly decrease over min_levels levels.
StabilityReport run_mollification_split(FractionalOrder alpha, const Nonlinearity& g, const MeasureSpec& mixed,
                                        const RefinementSchedule& schedule, const SolverConfig& cfg,
                                        const StabilityThresholds& thresholds = {});

/// Data ν plus mollified singular atoms along the schedule, compared with
/// the solution for ν alone on the finest grid. Same pass rule as
/// run_mollification_split. Requires monotone g and diffuse ν.
StabilityReport run_additive_perturbation(FractionalOrder alpha, const Nonlinearity& g, const MeasureSpec& nu,
                                          const MeasureSpec& singular, const RefinementSchedule& schedule,
                                          const SolverConfig& cfg, const StabilityThresholds& thresholds = {});

bool strictly_decreasing(const std::vector<double>& values);

}  // namespace fraclab
