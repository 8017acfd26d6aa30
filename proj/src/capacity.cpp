#include "fraclab/capacity.hpp"

#include <algorithm>

#include "fraclab/errors.hpp"

namespace fraclab {

CapacityResult capacity(const DirichletOperator& op, const std::vector<std::size_t>& nodes) {
    const auto N = static_cast<Eigen::Index>(op.size());
    CapacityResult out;
    out.equilibrium = Vector::Zero(N);
    if (nodes.empty()) return out;

    std::vector<char> in_set(op.size(), 0);
    for (std::size_t k : nodes) {
        if (k >= op.size()) throw ParameterError("capacity: node index outside the grid");
        in_set[k] = 1;
    }
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < N; ++i)
        if (!in_set[static_cast<std::size_t>(i)]) free.push_back(i);

    Vector& e = out.equilibrium;
    for (Eigen::Index i = 0; i < N; ++i)
        if (in_set[static_cast<std::size_t>(i)]) e[i] = 1.0;

    if (!free.empty()) {
        const auto M = static_cast<Eigen::Index>(free.size());
        const Eigen::MatrixXd& L = op.matrix();
        Eigen::MatrixXd block(M, M);
        Vector rhs(M);
        for (Eigen::Index r = 0; r < M; ++r) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < N; ++j)
                if (in_set[static_cast<std::size_t>(j)]) s -= L(free[r], j);
            rhs[r] = s;
            for (Eigen::Index c = 0; c < M; ++c) block(r, c) = L(free[r], free[c]);
        }
        Eigen::LLT<Eigen::MatrixXd> llt(block);
        if (llt.info() != Eigen::Success) throw NumericError("capacity: factorization failed", 0.0);
        Vector x = llt.solve(rhs);
        x += llt.solve(rhs - block * x);
        for (Eigen::Index r = 0; r < M; ++r) e[free[r]] = std::clamp(x[r], 0.0, 1.0);
    }
    out.value = op.energy(e);
    return out;
}

std::vector<CapacityLevel> point_capacity_refinement(FractionalOrder alpha, double x0,
                                                     const std::vector<std::size_t>& sizes, double a, double b) {
    if (sizes.empty()) throw ParameterError("point_capacity_refinement: no grid sizes");
    for (std::size_t k = 1; k < sizes.size(); ++k)
        if (sizes[k] <= sizes[k - 1]) throw ParameterError("point_capacity_refinement: sizes must increase");
    std::vector<CapacityLevel> out;
    for (std::size_t n : sizes) {
        const Domain d = Domain::make(a, b, n);
        if (!d.contains(x0)) throw ParameterError("point_capacity_refinement: x0 must be interior");
        const auto op = DirichletOperator::assemble(d, alpha);
        out.push_back({n, capacity(op, {d.nearest_node(x0)}).value});
    }
    return out;
}

}  // namespace fraclab
