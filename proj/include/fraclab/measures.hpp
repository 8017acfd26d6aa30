#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fraclab/domain.hpp"

namespace fraclab {

/// A density from the built-in registry.
///
/// Registry ids and parameter lists:
///   constant  [c]                     f(x) = c
///   bump      [center, radius, peak]  smooth compactly supported bump
///   step      [x0, left, right]       left for x < x0, right for x >= x0
/// Unknown ids or wrong parameter counts raise ParameterError.
class DensityTerm {
public:
    DensityTerm(std::string id, std::vector<double> params);

    static DensityTerm constant(double c) { return DensityTerm("constant", {c}); }

    double operator()(double x) const;
    const std::string& id() const { return id_; }
    const std::vector<double>& params() const { return params_; }

    // Points where the density is not smooth, used to split quadrature panels.
    std::vector<double> breakpoints() const;
    bool is_zero() const;
    DensityTerm scaled(double factor) const;

private:
    enum class Kind { constant, bump, step };
    std::string id_;
    std::vector<double> params_;
    Kind kind_;
};

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

/// Equation data μ = (sum of registry densities)·m + (sum of atoms).
struct MeasureSpec {
    std::vector<DensityTerm> densities;
    std::vector<Atom> atoms;

    bool has_density() const;
    bool has_atoms() const;
    bool trivial() const { return !has_density() && !has_atoms(); }
    double density(double x) const;
    MeasureSpec scaled(double factor) const;

    friend MeasureSpec operator+(MeasureSpec lhs, const MeasureSpec& rhs);
};

/// Node masses on the interior grid; the discrete home of a measure.
struct GridMeasure {
    Domain domain;
    Vector masses;                       // units of mass (density·h for a.c. parts)
    std::vector<std::size_t> atom_nodes; // nodes that received a snapped atom

    static GridMeasure zero(const Domain& domain);

    double tv_norm() const { return masses.cwiseAbs().sum(); }
    Vector density() const { return masses / domain.h; }
    bool nonnegative() const { return masses.minCoeff() >= 0.0; }
    bool trivial() const { return tv_norm() == 0.0; }

    GridMeasure scaled(double factor) const;
    friend GridMeasure operator+(const GridMeasure& lhs, const GridMeasure& rhs);
    friend GridMeasure operator-(const GridMeasure& lhs, const GridMeasure& rhs);
};

// Total variation norm Σ|masses|.
double tv_norm(const GridMeasure& mu);

/// Midpoint-rule discretization; each atom's mass goes to its nearest node.
GridMeasure discretize(const MeasureSpec& spec, const Domain& domain);

/// Standard mollifier j_ε(x) = ε⁻¹ j(x/ε) with j(x) = c·exp(1/(x²-1)) on |x| < 1.
class Mollifier {
public:
    explicit Mollifier(double epsilon);

    double operator()(double x) const;
    double epsilon() const { return epsilon_; }

    // c such that ∫ j = 1, computed once by adaptive quadrature.
    static double normalization();

private:
    double epsilon_;
};

struct MollifiedMeasure {
    GridMeasure measure;
    double lost_mass = 0.0;  // mass carried past the boundary by the smoothing
};

/// Grid discretization of j_ε ∗ μ restricted to the interior.
///
/// Atoms are spread with lattice weights renormalized to unit discrete mass;
/// densities (restricted to (a, b)) are convolved by Gauss-Kronrod quadrature
/// and sampled at the nodes. Requires ε >= 4h.
MollifiedMeasure mollify(const MeasureSpec& spec, double epsilon, const Domain& domain);

/// Split μ = μ_d + μ_c by capacity: densities are diffuse; atoms are
/// concentrated when points are polar (alpha <= 1 in one dimension).
std::pair<MeasureSpec, MeasureSpec> decompose(const MeasureSpec& spec, FractionalOrder alpha);

bool points_are_polar(FractionalOrder alpha);

}  // namespace fraclab
