#pragma once

#include <cstddef>
#include <memory>

#include <Eigen/Dense>

#include "fraclab/domain.hpp"
#include "fraclab/measures.hpp"
#include "fraclab/solution.hpp"

namespace fraclab {

// Dense storage limit for the nonlocal operator.
inline constexpr std::size_t kMaxInteriorNodes = 4096;

/// C(1, α) = 2^α Γ((1+α)/2) / (√π |Γ(-α/2)|), evaluated through log-gamma.
/// Vanishes at α = 2.
double fractional_laplacian_constant(double alpha);

/// Discrete Dirichlet operator for (-Δ)^{α/2} on an interval, zero exterior.
///
/// For α = 2 this is the three-point stencil. For α < 2 row i applies
/// weights C h / |k h|^{1+α} to u_i - u_{i+k}; the k = ±1 weights carry an
/// extra near-field term for the cell around the singularity, and the
/// exterior tail is integrated exactly into the diagonal. The matrix is a
/// symmetric, irreducible M-matrix in every case.
///
/// Immutable after assembly. Copies share one factorization, computed on
/// the first solve for α < 2.
class DirichletOperator {
public:
    static DirichletOperator assemble(const Domain& domain, FractionalOrder alpha);

    const Domain& domain() const { return domain_; }
    double alpha() const { return alpha_; }
    std::size_t size() const { return domain_.n_interior; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

    Vector apply(const Vector& u) const;

    // L⁻¹ rhs, by default with one step of iterative refinement.
    Vector solve(const Vector& rhs, bool refine = true) const;

    // Discrete E(u, u) = h uᵀ L u.
    double energy(const Vector& u) const;

    // (L + βI)⁻¹ f.
    Vector resolvent(double beta, const Vector& f) const;

    // Row sums of L: the killing (exterior) mass per node.
    Vector killing() const { return matrix_.rowwise().sum(); }

    // Reciprocal condition estimate from the factorization.
    double rcond() const;

    // ‖L‖∞ (max absolute row sum).
    double norm_inf() const { return norm_inf_; }

    // Residual level reachable in double precision for an iterate of size
    // ‖u‖∞: a small multiple of ε ‖L‖∞ ‖u‖∞.
    double rounding_floor(double u_sup) const { return 1e-14 * norm_inf_ * u_sup; }

    struct Factorization;

private:
    DirichletOperator() = default;
    void check_length(const Vector& v, const char* what) const;

    Domain domain_;
    double alpha_ = 2.0;
    Eigen::MatrixXd matrix_;
    double norm_inf_ = 0.0;
    std::shared_ptr<const Factorization> factor_;
};

/// Potential Rμ: solves L u = q with q = masses / h. The residual must not
/// exceed 1e-10 ‖q‖∞ plus the rounding floor of the operator.
Solution solve_linear(const DirichletOperator& op, const GridMeasure& mu);

}  // namespace fraclab
