#include "fraclab/domain.hpp"

#include <cmath>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

Domain Domain::make(double a, double b, std::size_t n_interior) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        std::ostringstream os;
        os << "domain requires a < b, got a=" << a << " b=" << b;
        throw ParameterError(os.str());
    }
    if (n_interior < 1) throw ParameterError("domain requires at least one interior node");
    Domain d;
    d.a = a;
    d.b = b;
    d.n_interior = n_interior;
    d.h = (b - a) / static_cast<double>(n_interior + 1);
    return d;
}

std::vector<double> Domain::nodes() const {
    std::vector<double> x(n_interior);
    for (std::size_t i = 0; i < n_interior; ++i) x[i] = node(i);
    return x;
}

std::size_t Domain::nearest_node(double x) const {
    if (!contains(x)) throw ParameterError("point outside the open interval");
    // 1-based lattice index, clamped to the interior range
    double s = (x - a) / h;
    auto k = static_cast<long long>(std::ceil(s - 0.5));
    if (k < 1) k = 1;
    if (k > static_cast<long long>(n_interior)) k = static_cast<long long>(n_interior);
    return static_cast<std::size_t>(k - 1);
}

bool Domain::same_grid(const Domain& other) const {
    return a == other.a && b == other.b && n_interior == other.n_interior;
}

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
        std::ostringstream os;
        os << "fractional order must lie in (0, 2], got " << alpha;
        throw ParameterError(os.str());
    }
}

double interpolate(const Domain& domain, const Vector& values, double x) {
    if (static_cast<std::size_t>(values.size()) != domain.n_interior)
        throw ShapeError("interpolate: vector length does not match the grid");
    if (!(x > domain.a && x < domain.b)) return 0.0;
    double s = (x - domain.a) / domain.h;  // lattice coordinate, boundary nodes at 0 and n+1
    auto k = static_cast<std::size_t>(std::floor(s));
    double t = s - static_cast<double>(k);
    const std::size_t n = domain.n_interior;
    if (k > n) k = n, t = 1.0;
    double left = (k == 0) ? 0.0 : values[static_cast<Eigen::Index>(k - 1)];
    double right = (k + 1 > n) ? 0.0 : values[static_cast<Eigen::Index>(k)];
    return left + t * (right - left);
}

}  // namespace fraclab
