#include "fraclab/nonlinearity.hpp"

#include <cmath>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

NonlinearityKind parse_nonlinearity_kind(const std::string& name) {
    if (name == "pure_power") return NonlinearityKind::pure_power;
    if (name == "shifted_power") return NonlinearityKind::shifted_power;
    if (name == "oscillating_power") return NonlinearityKind::oscillating_power;
    throw ParameterError("unknown nonlinearity kind '" + name + "'");
}

std::string to_string(NonlinearityKind kind) {
    switch (kind) {
    case NonlinearityKind::pure_power:
        return "pure_power";
    case NonlinearityKind::shifted_power:
        return "shifted_power";
    case NonlinearityKind::oscillating_power:
        return "oscillating_power";
    }
    return "unknown";
}

Nonlinearity::Nonlinearity(NonlinearityKind kind, double gamma, double c1, double c2, bool monotone)
    : kind_(kind), gamma_(gamma), c1_(c1), c2_(c2), monotone_(monotone) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("nonlinearity exponent gamma must be > 0");
    if (!(c1 > 0.0) || !std::isfinite(c1)) throw ParameterError("nonlinearity constant c1 must be > 0");
    if (!(c2 >= c1) || !std::isfinite(c2)) throw ParameterError("nonlinearity constant c2 must be >= c1");

    constexpr int samples = 1000;
    constexpr double rel = 1e-12;
    double previous = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double u = std::pow(10.0, -8.0 + 16.0 * k / (samples - 1));
        const double g = (*this)(u);
        const double growth = g * std::pow(u, gamma_);
        if (growth < c1_ * (1.0 - rel) || growth > c2_ * (1.0 + rel)) {
            std::ostringstream os;
            os << "growth bound c1 <= g(u) u^gamma <= c2 fails at u=" << u << " (value " << growth << ")";
            throw ParameterError(os.str());
        }
        if (monotone_ && k > 0 && g > previous * (1.0 + rel)) {
            std::ostringstream os;
            os << to_string(kind_) << " declared monotone but increases near u=" << u;
            throw ParameterError(os.str());
        }
        previous = g;
    }
}

double Nonlinearity::operator()(double u) const {
    switch (kind_) {
    case NonlinearityKind::pure_power:
        if (gamma_ == 1.0) return c1_ / u;
        if (gamma_ == 2.0) return c1_ / (u * u);
        return c1_ * std::pow(u, -gamma_);
    case NonlinearityKind::shifted_power:
        return c1_ * std::pow(u, -gamma_) + (c2_ - c1_) * std::pow(1.0 + u, -gamma_);
    case NonlinearityKind::oscillating_power:
        return std::pow(u, -gamma_) * (c1_ + 0.5 * (c2_ - c1_) * (1.0 + std::sin(4.0 * std::log(u))));
    }
    return 0.0;
}

Nonlinearity Nonlinearity::with_exponent(double exponent) const {
    return Nonlinearity(kind_, exponent, c1_, c2_, monotone_);
}

}  // namespace fraclab
