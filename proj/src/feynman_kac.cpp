#include "fraclab/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "fraclab/errors.hpp"
#include "fraclab/parallel.hpp"

namespace fraclab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream for one path, independent of how paths are grouped into batches.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) {
    return splitmix64(splitmix64(seed) ^ splitmix64(path + 0x632be59bd9b4e019ULL));
}

struct BatchResult {
    RunningMoments occupation;
    RunningMoments lifetime;
    std::size_t timeouts = 0;
};

class Walker {
public:
    Walker(FractionalOrder alpha, const Domain& domain, const WalkConfig& cfg)
        : alpha_(alpha.value()),
          a_(domain.a),
          b_(domain.b),
          dt_(cfg.dt),
          scale_(std::pow(cfg.dt, 1.0 / alpha.value())),
          sigma_(std::sqrt(2.0 * cfg.dt)),
          limit_(cfg.step_limit(alpha, domain)),
          bridge_(cfg.bridge_correction && alpha.is_local()) {}

    // Returns (occupation, steps); steps == limit flags a timeout.
    template <typename F>
    std::pair<double, std::int64_t> run(boost::random::mt19937_64& rng, double x, const F& integrand) const {
        if (alpha_ == 2.0)
            return bridge_ ? walk<Jump::gaussian, true>(rng, x, integrand) : walk<Jump::gaussian, false>(rng, x, integrand);
        if (alpha_ == 1.0) return walk<Jump::cauchy, false>(rng, x, integrand);
        return walk<Jump::stable, false>(rng, x, integrand);
    }

    std::int64_t limit() const { return limit_; }

private:
    enum class Jump { gaussian, cauchy, stable };

    template <Jump J, bool Bridge, typename F>
    std::pair<double, std::int64_t> walk(boost::random::mt19937_64& rng, double x, const F& integrand) const {
        boost::random::normal_distribution<double> normal;
        boost::random::uniform_01<double> uniform;
        boost::random::exponential_distribution<double> exponential;
        const double a = a_, b = b_, dt = dt_, alpha = alpha_;
        const double step = J == Jump::gaussian ? sigma_ : scale_;
        const double window = 40.0 * dt;
        const std::int64_t limit = limit_;
        double occ = 0.0;
        std::int64_t k = 0;
        while (k < limit) {
            occ += integrand(x);
            ++k;
            double y;
            if constexpr (J == Jump::gaussian) {
                y = x + step * normal(rng);
            } else if constexpr (J == Jump::cauchy) {
                // ratio of independent standard normals is standard Cauchy
                const double num = normal(rng);
                y = x + step * num / normal(rng);
            } else {
                const double v = (uniform(rng) - 0.5) * std::numbers::pi;
                y = x + step * stable_variate(alpha, v, exponential(rng));
            }
            if (!(y > a && y < b)) break;
            if constexpr (Bridge) {
                const double dl = (x - a) * (y - a);
                const double dr = (b - x) * (b - y);
                if (dl < window && uniform(rng) < std::exp(-dl / dt)) break;
                if (dr < window && uniform(rng) < std::exp(-dr / dt)) break;
            }
            x = y;
        }
        return {occ * dt, k};
    }

    double alpha_;
    double a_;
    double b_;
    double dt_;
    double scale_;
    double sigma_;
    std::int64_t limit_;
    bool bridge_;
};

template <typename F>
WalkEstimate simulate(FractionalOrder alpha, const Domain& domain, double x, const F& integrand,
                      const WalkConfig& cfg) {
    cfg.validate();
    if (!domain.contains(x)) throw ParameterError("walk start point must lie inside the interval");
    const Walker walker(alpha, domain, cfg);
    const std::size_t batches = (cfg.samples + cfg.batch - 1) / cfg.batch;
    auto results = parallel_map<BatchResult>(
        batches,
        [&](std::size_t b) {
            BatchResult r;
            const std::size_t first = b * cfg.batch;
            const std::size_t last = std::min(cfg.samples, first + cfg.batch);
            for (std::size_t p = first; p < last; ++p) {
                boost::random::mt19937_64 rng(path_seed(cfg.seed, p));
                const auto [occ, steps] = walker.run(rng, x, integrand);
                if (steps >= walker.limit()) ++r.timeouts;
                r.occupation.add(occ);
                r.lifetime.add(static_cast<double>(steps) * cfg.dt);
            }
            return r;
        },
        cfg.workers);
    BatchResult total;
    for (const auto& r : results) {
        total.occupation.merge(r.occupation);
        total.lifetime.merge(r.lifetime);
        total.timeouts += r.timeouts;
    }
    return {Estimate::from(total.occupation, total.timeouts), Estimate::from(total.lifetime, total.timeouts)};
}

// u on the grid padded with the zero boundary values, interpolated linearly.
class GridFunction {
public:
    explicit GridFunction(const Solution& s)
        : a_(s.domain.a), inv_h_(1.0 / s.domain.h), values_(s.u.size() + 2, 0.0) {
        for (Eigen::Index i = 0; i < s.u.size(); ++i) values_[static_cast<std::size_t>(i) + 1] = s.u[i];
    }
    double operator()(double x) const {
        const double t = (x - a_) * inv_h_;
        const auto last = static_cast<double>(values_.size() - 1);
        if (!(t > 0.0) || !(t < last)) return 0.0;
        const auto j = static_cast<std::size_t>(t);
        const double w = t - static_cast<double>(j);
        return values_[j] * (1.0 - w) + values_[j + 1] * w;
    }

private:
    double a_;
    double inv_h_;
    std::vector<double> values_;
};

template <typename R>
McReport verify_impl(const Solution& u, FractionalOrder alpha, const R& reaction, const MeasureSpec& data,
                     const std::vector<double>& points, const WalkConfig& cfg, double allowance) {
    if (data.has_atoms()) throw UnsupportedMeasureError("Monte Carlo verification supports density measures only");
    if (!(allowance >= 0.0)) throw ParameterError("allowance must be nonnegative");
    const GridFunction field(u);
    bool constant = std::all_of(data.densities.begin(), data.densities.end(),
                                [](const DensityTerm& d) { return d.id() == "constant"; });
    double c = 0.0;
    for (const auto& d : data.densities) c += constant ? d.params()[0] : 0.0;

    McReport rep;
    rep.allowance = allowance;
    rep.pass = true;
    for (double x : points) {
        if (!u.domain.contains(x)) throw ParameterError("verification point outside the interval");
        WalkEstimate w = constant ? simulate(alpha, u.domain, x,
                                             [&](double y) { return reaction(field(y)) * c; }, cfg)
                                  : simulate(alpha, u.domain, x,
                                             [&](double y) { return reaction(field(y)) * data.density(y); }, cfg);
        McPoint p;
        p.x = x;
        p.u_deterministic = field(x);
        p.estimate = w.occupation;
        p.lifetime = w.lifetime;
        const double denom = p.estimate.std_error + allowance;
        const double diff = std::abs(p.u_deterministic - p.estimate.mean);
        p.z = denom > 0.0 ? diff / denom : (diff == 0.0 ? 0.0 : INFINITY);
        rep.pass = rep.pass && p.estimate.valid() && p.z <= 3.0;
        rep.points.push_back(p);
    }
    return rep;
}

}  // namespace

void WalkConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt) || dt >= 1.0) throw ParameterError("walk time step must lie in (0, 1)");
    if (max_steps < 0) throw ParameterError("max_steps must be >= 0");
    if (samples == 0) throw ParameterError("at least one sample path is required");
    if (batch == 0) throw ParameterError("batch size must be positive");
}

std::int64_t WalkConfig::step_limit(FractionalOrder alpha, const Domain& domain) const {
    if (max_steps > 0) return max_steps;
    const double r = 0.5 * domain.length();
    return static_cast<std::int64_t>(std::ceil(20.0 * std::pow(r, alpha.value()) / dt));
}

void RunningMoments::add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ = (na * mean_ + nb * other.mean_) / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    n_ += other.n_;
}

double RunningMoments::std_error() const {
    return n_ > 1 ? std::sqrt(std::max(0.0, variance()) / static_cast<double>(n_)) : 0.0;
}

Estimate Estimate::from(const RunningMoments& m, std::size_t timeouts) {
    Estimate e;
    e.mean = m.mean();
    e.std_error = m.std_error();
    e.n_samples = m.count();
    e.timeout_fraction = m.count() ? static_cast<double>(timeouts) / static_cast<double>(m.count()) : 0.0;
    return e;
}

double stable_variate(double alpha, double v, double w) {
    if (alpha == 1.0) return std::tan(v);
    const double cv = std::cos(v);
    return std::sin(alpha * v) / std::pow(cv, 1.0 / alpha) *
           std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

WalkEstimate simulate_walk(FractionalOrder alpha, const Domain& domain, double x,
                           const std::function<double(double)>& integrand, const WalkConfig& cfg) {
    return simulate(alpha, domain, x, integrand, cfg);
}

Estimate sample_occupation(FractionalOrder alpha, const Domain& domain, double x, const DensityTerm& f,
                           const WalkConfig& cfg) {
    if (f.is_zero()) {
        cfg.validate();
        if (!domain.contains(x)) throw ParameterError("walk start point must lie inside the interval");
        Estimate e;
        e.n_samples = cfg.samples;
        return e;
    }
    if (f.id() == "constant") {
        const double c = f.params()[0];
        return simulate(alpha, domain, x, [c](double) { return c; }, cfg).occupation;
    }
    return simulate(alpha, domain, x, [&f](double y) { return f(y); }, cfg).occupation;
}

McReport verify_solution_mc(const Solution& u, FractionalOrder alpha, const std::function<double(double)>& reaction,
                            const MeasureSpec& data, const std::vector<double>& points, const WalkConfig& cfg,
                            double allowance) {
    return verify_impl(u, alpha, reaction, data, points, cfg, allowance);
}

McReport verify_solution_mc(const Solution& u, const DirichletOperator& op, const Nonlinearity& g,
                            const MeasureSpec& data, const std::vector<double>& points, const WalkConfig& cfg,
                            double allowance) {
    if (!u.domain.same_grid(op.domain())) throw ShapeError("solution and operator live on different grids");
    const FractionalOrder alpha(op.alpha());
    if (g.kind() == NonlinearityKind::pure_power && g.gamma() == 1.0) {
        const double c = g.c1();
        return verify_impl(u, alpha, [c](double v) { return c / v; }, data, points, cfg, allowance);
    }
    return verify_impl(u, alpha, [&g](double v) { return g(v); }, data, points, cfg, allowance);
}

double expected_exit_time(double alpha, double radius, double offset) {
    FractionalOrder check(alpha);
    if (!(radius > 0.0)) throw ParameterError("radius must be positive");
    if (std::abs(offset) >= radius) return 0.0;
    const double log_b = alpha * std::numbers::ln2 + std::lgamma(1.0 + 0.5 * alpha) +
                         std::lgamma(0.5 * (1.0 + alpha)) - std::lgamma(0.5);
    return std::pow(radius * radius - offset * offset, 0.5 * alpha) / std::exp(log_b);
}

}  // namespace fraclab
