#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fraclab/domain.hpp"
#include "fraclab/grid_operator.hpp"
#include "fraclab/measures.hpp"
#include "fraclab/nonlinearity.hpp"
#include "fraclab/solution.hpp"

namespace fraclab {

struct WalkConfig {
    double dt = 1e-5;
    std::int64_t max_steps = 0;  // 0: 20 r^α / dt with r the half-length of the interval
    std::size_t samples = 200000;
    std::size_t batch = 5000;    // paths per batch
    std::uint64_t seed = 1;
    // α = 2 only: kill between steps with the Brownian-bridge crossing
    // probability exp(-d₁d₂/dt) per boundary.
    bool bridge_correction = true;
    unsigned workers = 0;        // 0 = hardware concurrency

    void validate() const;
    std::int64_t step_limit(FractionalOrder alpha, const Domain& domain) const;
};

/// Mean, variance and count over independent samples; merge is Chan's
/// pairwise update.
class RunningMoments {
public:
    void add(double x);
    void merge(const RunningMoments& other);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double std_error() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    double timeout_fraction = 0.0;
    bool valid() const { return timeout_fraction < 0.01; }

    static Estimate from(const RunningMoments& m, std::size_t timeouts);
};

// Symmetric α-stable variate with E exp(itS) = exp(-|t|^α) by the
// Chambers-Mallows-Stuck transform of V ~ U(-π/2, π/2), W ~ Exp(1).
double stable_variate(double alpha, double v, double w);

/// Occupation integral and lifetime of the walk, estimated together on the
/// same paths.
struct WalkEstimate {
    Estimate occupation;  // E_x Σ F(X_k) dt
    Estimate lifetime;    // E_x ζ
};

/// Simulates the killed walk from x with increments dt^{1/α} S (Gaussian
/// with variance 2dt for α = 2) and accumulates the left-endpoint sum of F
/// until the first step outside (a, b). Path p draws from its own stream
/// derived from (seed, p), so results do not depend on `batch` beyond the
/// merge order.
WalkEstimate simulate_walk(FractionalOrder alpha, const Domain& domain, double x,
                           const std::function<double(double)>& integrand, const WalkConfig& cfg);

/// E_x ∫₀^ζ f(X_t) dt for a registry density f.
Estimate sample_occupation(FractionalOrder alpha, const Domain& domain, double x, const DensityTerm& f,
                           const WalkConfig& cfg);

struct McPoint {
    double x = 0.0;
    double u_deterministic = 0.0;
    Estimate estimate;
    Estimate lifetime;
    double z = 0.0;  // |u - mean| / (stderr + allowance)
};

struct McReport {
    std::vector<McPoint> points;
    double allowance = 0.0;
    bool pass = false;  // every estimate valid and every z <= 3
};

/// Checks u(x) = E_x ∫₀^ζ r(u(X_t)) f(X_t) dt at each point, with u
/// interpolated linearly between nodes and the reaction r frozen. The data
/// must be a pure density; atoms raise UnsupportedMeasureError.
McReport verify_solution_mc(const Solution& u, FractionalOrder alpha, const std::function<double(double)>& reaction,
                            const MeasureSpec& data, const std::vector<double>& points, const WalkConfig& cfg,
                            double allowance = 1e-3);

McReport verify_solution_mc(const Solution& u, const DirichletOperator& op, const Nonlinearity& g,
                            const MeasureSpec& data, const std::vector<double>& points, const WalkConfig& cfg,
                            double allowance = 1e-3);

// E_x ζ for the interval (c - r, c + r): (r² - (x-c)²)^{α/2} / B_α with
// B_α = 2^α Γ(1+α/2) Γ((1+α)/2) / Γ(1/2).
double expected_exit_time(double alpha, double radius, double offset);

}  // namespace fraclab
