#include "fraclab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

std::size_t expected_params(const std::string& id) {
    if (id == "constant") return 1;
    if (id == "bump") return 3;
    if (id == "step") return 3;
    throw ParameterError("unknown density id '" + id + "' (expected constant, bump or step)");
}

// exp(1/(t²-1)) on |t| < 1, zero outside
double bump_profile(double t) {
    const double s = t * t;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 / (s - 1.0));
}

}  // namespace

DensityTerm::DensityTerm(std::string id, std::vector<double> params)
    : id_(std::move(id)), params_(std::move(params)) {
    const std::size_t want = expected_params(id_);
    if (params_.size() != want) {
        std::ostringstream os;
        os << "density '" << id_ << "' takes " << want << " parameters, got " << params_.size();
        throw ParameterError(os.str());
    }
    for (double p : params_)
        if (!std::isfinite(p)) throw ParameterError("density parameters must be finite");
    if (id_ == "constant") {
        kind_ = Kind::constant;
        if (params_[0] < 0.0) throw ParameterError("constant density must be nonnegative");
    } else if (id_ == "bump") {
        kind_ = Kind::bump;
        if (!(params_[1] > 0.0)) throw ParameterError("bump radius must be positive");
        if (params_[2] < 0.0) throw ParameterError("bump peak must be nonnegative");
    } else {
        kind_ = Kind::step;
        if (params_[1] < 0.0 || params_[2] < 0.0) throw ParameterError("step values must be nonnegative");
    }
}

double DensityTerm::operator()(double x) const {
    switch (kind_) {
    case Kind::constant:
        return params_[0];
    case Kind::bump:
        // peak at the center: exp(1) * exp(1/(t²-1)) equals 1 at t = 0
        return params_[2] * std::exp(1.0) * bump_profile((x - params_[0]) / params_[1]);
    case Kind::step:
        return x < params_[0] ? params_[1] : params_[2];
    }
    return 0.0;
}

std::vector<double> DensityTerm::breakpoints() const {
    switch (kind_) {
    case Kind::constant:
        return {};
    case Kind::bump:
        return {params_[0] - params_[1], params_[0] + params_[1]};
    case Kind::step:
        return {params_[0]};
    }
    return {};
}

bool DensityTerm::is_zero() const {
    switch (kind_) {
    case Kind::constant:
        return params_[0] == 0.0;
    case Kind::bump:
        return params_[2] == 0.0;
    case Kind::step:
        return params_[1] == 0.0 && params_[2] == 0.0;
    }
    return true;
}

DensityTerm DensityTerm::scaled(double factor) const {
    auto p = params_;
    switch (kind_) {
    case Kind::constant:
        p[0] *= factor;
        break;
    case Kind::bump:
        p[2] *= factor;
        break;
    case Kind::step:
        p[1] *= factor;
        p[2] *= factor;
        break;
    }
    return DensityTerm(id_, std::move(p));
}

bool MeasureSpec::has_density() const {
    return std::any_of(densities.begin(), densities.end(), [](const DensityTerm& d) { return !d.is_zero(); });
}

bool MeasureSpec::has_atoms() const {
    return std::any_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.mass > 0.0; });
}

double MeasureSpec::density(double x) const {
    double s = 0.0;
    for (const auto& d : densities) s += d(x);
    return s;
}

MeasureSpec MeasureSpec::scaled(double factor) const {
    if (!(factor >= 0.0)) throw ParameterError("measure scale factor must be nonnegative");
    MeasureSpec out;
    for (const auto& d : densities) out.densities.push_back(d.scaled(factor));
    for (const auto& a : atoms) out.atoms.push_back({a.location, a.mass * factor});
    return out;
}

MeasureSpec operator+(MeasureSpec lhs, const MeasureSpec& rhs) {
    lhs.densities.insert(lhs.densities.end(), rhs.densities.begin(), rhs.densities.end());
    lhs.atoms.insert(lhs.atoms.end(), rhs.atoms.begin(), rhs.atoms.end());
    return lhs;
}

GridMeasure GridMeasure::zero(const Domain& domain) {
    return GridMeasure{domain, Vector::Zero(static_cast<Eigen::Index>(domain.n_interior)), {}};
}

GridMeasure GridMeasure::scaled(double factor) const {
    GridMeasure out = *this;
    out.masses *= factor;
    return out;
}

static void require_same_grid(const GridMeasure& lhs, const GridMeasure& rhs) {
    if (!lhs.domain.same_grid(rhs.domain)) throw ShapeError("measures live on different grids");
}

GridMeasure operator+(const GridMeasure& lhs, const GridMeasure& rhs) {
    require_same_grid(lhs, rhs);
    GridMeasure out{lhs.domain, lhs.masses + rhs.masses, lhs.atom_nodes};
    out.atom_nodes.insert(out.atom_nodes.end(), rhs.atom_nodes.begin(), rhs.atom_nodes.end());
    std::sort(out.atom_nodes.begin(), out.atom_nodes.end());
    out.atom_nodes.erase(std::unique(out.atom_nodes.begin(), out.atom_nodes.end()), out.atom_nodes.end());
    return out;
}

GridMeasure operator-(const GridMeasure& lhs, const GridMeasure& rhs) {
    return lhs + rhs.scaled(-1.0);
}

double tv_norm(const GridMeasure& mu) { return mu.tv_norm(); }

static void validate_atoms(const MeasureSpec& spec, const Domain& domain) {
    for (const auto& atom : spec.atoms) {
        if (!domain.contains(atom.location)) {
            std::ostringstream os;
            os << "atom at " << atom.location << " lies outside (" << domain.a << ", " << domain.b << ")";
            throw ParameterError(os.str());
        }
        if (!(atom.mass >= 0.0) || !std::isfinite(atom.mass)) throw ParameterError("atom masses must be finite and >= 0");
    }
}

GridMeasure discretize(const MeasureSpec& spec, const Domain& domain) {
    validate_atoms(spec, domain);
    GridMeasure mu = GridMeasure::zero(domain);
    if (!spec.densities.empty()) {
        for (std::size_t i = 0; i < domain.n_interior; ++i)
            mu.masses[static_cast<Eigen::Index>(i)] = spec.density(domain.node(i)) * domain.h;
    }
    for (const auto& atom : spec.atoms) {
        if (atom.mass == 0.0) continue;
        const std::size_t k = domain.nearest_node(atom.location);
        mu.masses[static_cast<Eigen::Index>(k)] += atom.mass;
        mu.atom_nodes.push_back(k);
    }
    std::sort(mu.atom_nodes.begin(), mu.atom_nodes.end());
    mu.atom_nodes.erase(std::unique(mu.atom_nodes.begin(), mu.atom_nodes.end()), mu.atom_nodes.end());
    return mu;
}

double Mollifier::normalization() {
    static const double c = [] {
        boost::math::quadrature::tanh_sinh<double> integrator;
        const double integral = integrator.integrate([](double t) { return bump_profile(t); }, -1.0, 1.0);
        return 1.0 / integral;
    }();
    return c;
}

Mollifier::Mollifier(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("mollifier radius must be positive");
}

double Mollifier::operator()(double x) const {
    return normalization() / epsilon_ * bump_profile(x / epsilon_);
}

MollifiedMeasure mollify(const MeasureSpec& spec, double epsilon, const Domain& domain) {
    if (!(epsilon > 0.0)) throw ParameterError("mollification radius must be positive");
    if (epsilon < 4.0 * domain.h) {
        std::ostringstream os;
        os << "mollification radius " << epsilon << " is under-resolved (needs >= 4h = " << 4.0 * domain.h << ")";
        throw ParameterError(os.str());
    }
    validate_atoms(spec, domain);
    const Mollifier j(epsilon);
    const auto N = static_cast<Eigen::Index>(domain.n_interior);
    MollifiedMeasure out{GridMeasure::zero(domain), 0.0};
    auto& masses = out.measure.masses;

    // Atoms: lattice weights over all nodes a + k h (k in Z) within ε,
    // renormalized to unit discrete mass; weight off the interior is lost.
    for (const auto& atom : spec.atoms) {
        if (atom.mass == 0.0) continue;
        const double s = (atom.location - domain.a) / domain.h;
        const auto k_lo = static_cast<long long>(std::floor(s - epsilon / domain.h));
        const auto k_hi = static_cast<long long>(std::ceil(s + epsilon / domain.h));
        double total = 0.0;
        for (long long k = k_lo; k <= k_hi; ++k)
            total += j(domain.a + static_cast<double>(k) * domain.h - atom.location);
        for (long long k = k_lo; k <= k_hi; ++k) {
            const double w = atom.mass * j(domain.a + static_cast<double>(k) * domain.h - atom.location) / total;
            if (k >= 1 && k <= N)
                masses[static_cast<Eigen::Index>(k - 1)] += w;
            else
                out.lost_mass += w;
        }
    }

    // Densities (restricted to the domain): (j_ε ∗ f)(x_i) h, one term at a time.
    // Lost mass is reported against the midpoint mass of the unsmoothed term.
    for (const auto& term : spec.densities) {
        if (term.is_zero()) continue;
        const auto cuts = term.breakpoints();
        double original = 0.0, convolved = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
            const double x = domain.node(static_cast<std::size_t>(i));
            const double lo = std::max(domain.a, x - epsilon);
            const double hi = std::min(domain.b, x + epsilon);
            std::vector<double> panels{lo};
            for (double c : cuts)
                if (c > lo && c < hi) panels.push_back(c);
            panels.push_back(hi);
            std::sort(panels.begin(), panels.end());
            double value = 0.0;
            for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
                value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                    [&](double y) { return j(x - y) * term(y); }, panels[p], panels[p + 1], 15, 1e-13);
            }
            masses[i] += value * domain.h;
            original += term(x) * domain.h;
            convolved += value * domain.h;
        }
        out.lost_mass += std::max(0.0, original - convolved);
    }
    return out;
}

bool points_are_polar(FractionalOrder alpha) { return alpha.value() <= 1.0; }

std::pair<MeasureSpec, MeasureSpec> decompose(const MeasureSpec& spec, FractionalOrder alpha) {
    MeasureSpec diffuse, concentrated;
    diffuse.densities = spec.densities;
    if (points_are_polar(alpha))
        concentrated.atoms = spec.atoms;
    else
        diffuse.atoms = spec.atoms;
    return {diffuse, concentrated};
}

}  // namespace fraclab
