#pragma once

#include <cstdint>
#include <vector>

#include "fraclab/domain.hpp"

namespace fraclab {

/// Interior node values plus solver diagnostics.
struct Solution {
    Domain domain;
    Vector u;
    double residual = 0.0;           // relative sup residual of the accepted iterate
    double bracket_gap = 0.0;        // sup |T(u) - u| for one undamped map step
    std::vector<double> level_trace; // sup |u_n - u_prev| per regularization level
    std::vector<std::int64_t> levels;
    std::int64_t last_level = 0;
    int iterations = 0;
    bool signed_data = false;        // linear solve received a signed measure
    bool possibly_nonunique = false; // non-monotone nonlinearity

    double max() const { return u.size() ? u.maxCoeff() : 0.0; }
    double min() const { return u.size() ? u.minCoeff() : 0.0; }
    double at(double x) const { return interpolate(domain, u, x); }
};

}  // namespace fraclab
