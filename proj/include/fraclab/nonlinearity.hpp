#pragma once

#include <string>

namespace fraclab {

enum class NonlinearityKind {
    pure_power,        // c1 u^{-γ}
    shifted_power,     // c1 u^{-γ} + (c2 - c1)(1 + u)^{-γ}; nonincreasing
    oscillating_power  // u^{-γ} (c1 + (c2 - c1)(1 + sin(4 ln u)) / 2); not monotone in general
};

NonlinearityKind parse_nonlinearity_kind(const std::string& name);
std::string to_string(NonlinearityKind kind);

/// Singular nonlinearity g with growth c1 <= g(u) u^γ <= c2 for u > 0.
///
/// Construction samples the growth bounds on 1000 log-spaced points in
/// [1e-8, 1e8] and, when `monotone` is claimed, nonincreasingness on the same
/// mesh; either failure raises ParameterError.
class Nonlinearity {
public:
    Nonlinearity(NonlinearityKind kind, double gamma, double c1, double c2, bool monotone);

    static Nonlinearity power(double gamma, double c = 1.0) {
        return Nonlinearity(NonlinearityKind::pure_power, gamma, c, c, true);
    }

    // Only called with u > 0.
    double operator()(double u) const;

    NonlinearityKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    bool monotone() const { return monotone_; }

    // Same shape with exponent replaced (used for the β term of mixed problems).
    Nonlinearity with_exponent(double exponent) const;

private:
    NonlinearityKind kind_;
    double gamma_;
    double c1_;
    double c2_;
    bool monotone_;
};

}  // namespace fraclab
