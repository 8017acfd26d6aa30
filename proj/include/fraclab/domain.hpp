#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace fraclab {

using Vector = Eigen::VectorXd;

/// Uniform grid on the open interval (a, b) with `n_interior` unknowns.
///
/// Interior node i (0-based) sits at a + (i+1)·h, h = (b-a)/(n_interior+1).
/// The solution is identically zero at the endpoints and outside (a, b).
struct Domain {
    double a = 0.0;
    double b = 1.0;
    std::size_t n_interior = 1;
    double h = 0.5;

    static Domain make(double a, double b, std::size_t n_interior);

    double node(std::size_t i) const { return a + static_cast<double>(i + 1) * h; }
    std::vector<double> nodes() const;
    double length() const { return b - a; }
    bool contains(double x) const { return x > a && x < b; }

    // Index of the interior node closest to x (ties go left); x must be inside.
    std::size_t nearest_node(double x) const;

    bool same_grid(const Domain& other) const;
};

/// Order of the fractional Laplacian, 0 < alpha <= 2.
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha);
    double value() const { return alpha_; }
    bool is_local() const { return alpha_ == 2.0; }

private:
    double alpha_;
};

// Linear interpolation of interior values on the grid, zero outside (a, b).
double interpolate(const Domain& domain, const Vector& values, double x);

}  // namespace fraclab
