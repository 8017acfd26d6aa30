#pragma once

#include <cstddef>
#include <vector>

#include "fraclab/grid_operator.hpp"

namespace fraclab {

struct CapacityResult {
    double value = 0.0;
    Vector equilibrium;  // 1 on the target set, L e = 0 on the other rows
};

/// Order-0 capacity of a node set: the energy h eᵀ L e of its equilibrium
/// potential. An empty set has capacity 0 and a zero potential.
CapacityResult capacity(const DirichletOperator& op, const std::vector<std::size_t>& nodes);

struct CapacityLevel {
    std::size_t n = 0;
    double value = 0.0;
};

/// Capacity of the single node nearest x0 on (a, b) for each grid size.
std::vector<CapacityLevel> point_capacity_refinement(FractionalOrder alpha, double x0,
                                                     const std::vector<std::size_t>& sizes, double a = 0.0,
                                                     double b = 1.0);

}  // namespace fraclab
