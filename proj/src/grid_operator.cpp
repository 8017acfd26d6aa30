#include "fraclab/grid_operator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <exception>
#include <mutex>
#include <variant>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

// Cholesky factor of a symmetric tridiagonal matrix with constant off-diagonal.
class TridiagonalCholesky {
public:
    TridiagonalCholesky(const Vector& diag, double off) : diag_(diag.size()), sub_(diag.size()) {
        const Eigen::Index n = diag.size();
        for (Eigen::Index i = 0; i < n; ++i) {
            double d = diag[i];
            if (i > 0) {
                sub_[i] = off / diag_[i - 1];
                d -= sub_[i] * sub_[i];
            }
            if (!(d > 0.0)) throw NumericError("tridiagonal factorization lost positivity", 0.0);
            diag_[i] = std::sqrt(d);
        }
    }

    Vector solve(const Vector& rhs) const {
        const Eigen::Index n = rhs.size();
        Vector y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = rhs[i];
            if (i > 0) s -= sub_[i] * y[i - 1];
            y[i] = s / diag_[i];
        }
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            double s = y[i];
            if (i + 1 < n) s -= sub_[i + 1] * y[i + 1];
            y[i] = s / diag_[i];
        }
        return y;
    }

private:
    Vector diag_;
    Vector sub_;
};

void throw_if_ill_conditioned(double rcond) {
    if (!(rcond > 1e-15)) {
        std::ostringstream os;
        os << "operator is singular or ill-conditioned (rcond estimate " << rcond << ")";
        throw NumericError(os.str(), rcond);
    }
}

}  // namespace

// Dense factors are computed on first use; the tridiagonal one at assembly.
struct DirichletOperator::Factorization {
    std::variant<std::monostate, TridiagonalCholesky, Eigen::LLT<Eigen::MatrixXd>> factor;
    double rcond = 0.0;
    mutable std::once_flag once;
    mutable std::exception_ptr failure;

    void ensure(const Eigen::MatrixXd& L) const {
        std::call_once(once, [&] {
            if (!std::holds_alternative<std::monostate>(factor)) return;
            auto& self = const_cast<Factorization&>(*this);
            try {
                auto& llt = self.factor.emplace<Eigen::LLT<Eigen::MatrixXd>>(L);
                if (llt.info() != Eigen::Success) throw NumericError("Cholesky factorization failed", 0.0);
                self.rcond = llt.rcond();
                throw_if_ill_conditioned(self.rcond);
            } catch (...) {
                failure = std::current_exception();
            }
        });
        if (failure) std::rethrow_exception(failure);
    }

    Vector solve(const Vector& rhs) const {
        if (const auto* t = std::get_if<TridiagonalCholesky>(&factor)) return t->solve(rhs);
        return std::get<Eigen::LLT<Eigen::MatrixXd>>(factor).solve(rhs);
    }
};

double fractional_laplacian_constant(double alpha) {
    FractionalOrder check(alpha);
    if (alpha == 2.0) return 0.0;
    // |Γ(-α/2)| = Γ(1 - α/2) / (α/2)
    const double log_c = alpha * std::numbers::ln2 + std::lgamma(0.5 * (1.0 + alpha)) -
                         0.5 * std::log(std::numbers::pi) - std::lgamma(1.0 - 0.5 * alpha) +
                         std::log(0.5 * alpha);
    return std::exp(log_c);
}

DirichletOperator DirichletOperator::assemble(const Domain& domain, FractionalOrder order) {
    const std::size_t n = domain.n_interior;
    if (n > kMaxInteriorNodes) {
        std::ostringstream os;
        os << "grid size " << n << " exceeds the dense limit " << kMaxInteriorNodes;
        throw ParameterError(os.str());
    }
    const double alpha = order.value();
    const double h = domain.h;
    const auto N = static_cast<Eigen::Index>(n);

    DirichletOperator op;
    op.domain_ = domain;
    op.alpha_ = alpha;
    op.matrix_ = Eigen::MatrixXd::Zero(N, N);
    auto& L = op.matrix_;
    auto factor = std::make_shared<Factorization>();

    if (order.is_local()) {
        const double s = 1.0 / (h * h);
        for (Eigen::Index i = 0; i < N; ++i) {
            L(i, i) = 2.0 * s;
            if (i > 0) L(i, i - 1) = -s;
            if (i + 1 < N) L(i, i + 1) = -s;
        }
        Vector diag = Vector::Constant(N, 2.0 * s);
        factor->factor.emplace<TridiagonalCholesky>(diag, -s);
        // eigenvalues (4/h²) sin²(kπ / (2(n+1))), k = 1..n
        const double t = std::numbers::pi / (2.0 * static_cast<double>(n + 1));
        const double lo = std::sin(t), hi = std::sin(static_cast<double>(n) * t);
        factor->rcond = (lo * lo) / (hi * hi);
    } else {
        const double c = fractional_laplacian_constant(alpha);
        // far-field weight per lattice distance k: C h^{-α} k^{-1-α}
        Vector weight(N);
        const double scale = c * std::pow(h, -alpha);
        weight[0] = 0.0;
        for (Eigen::Index k = 1; k < N; ++k)
            weight[k] = scale * std::pow(static_cast<double>(k), -1.0 - alpha);
        // near field: -u''(x) (h/2)^{2-α} / (2-α) with u'' from the 3-point stencil
        if (N > 1) weight[1] += c * std::pow(0.5 * h, 2.0 - alpha) / ((2.0 - alpha) * h * h);

        for (Eigen::Index i = 0; i < N; ++i) {
            for (Eigen::Index j = 0; j < N; ++j) {
                if (i != j) L(i, j) = -weight[std::abs(i - j)];
            }
        }
        // the near-field term also couples to the zero boundary nodes
        const double near = c * std::pow(0.5 * h, 2.0 - alpha) / ((2.0 - alpha) * h * h);
        for (Eigen::Index i = 0; i < N; ++i) {
            // exterior of the covered cells, at distances (i+1/2)h and (n-i-1/2)h
            const double left = (static_cast<double>(i) + 0.5) * h;
            const double right = (static_cast<double>(N - i) - 0.5) * h;
            double tail = c / alpha * (std::pow(left, -alpha) + std::pow(right, -alpha));
            if (i == 0) tail += near;
            if (i == N - 1) tail += near;
            L(i, i) = -L.row(i).sum() + tail;
        }
        op.norm_inf_ = L.cwiseAbs().rowwise().sum().maxCoeff();
        op.factor_ = std::move(factor);
        return op;
    }
    throw_if_ill_conditioned(factor->rcond);
    op.norm_inf_ = L.cwiseAbs().rowwise().sum().maxCoeff();
    op.factor_ = std::move(factor);
    return op;
}

void DirichletOperator::check_length(const Vector& v, const char* what) const {
    if (static_cast<std::size_t>(v.size()) != size()) {
        std::ostringstream os;
        os << what << ": vector length " << v.size() << " does not match grid size " << size();
        throw ShapeError(os.str());
    }
}

Vector DirichletOperator::apply(const Vector& u) const {
    check_length(u, "apply");
    return matrix_ * u;
}

Vector DirichletOperator::solve(const Vector& rhs, bool refine) const {
    check_length(rhs, "solve");
    factor_->ensure(matrix_);
    Vector u = factor_->solve(rhs);
    if (refine) {
        Vector r = rhs - matrix_ * u;
        u += factor_->solve(r);
    }
    return u;
}

double DirichletOperator::energy(const Vector& u) const {
    check_length(u, "energy");
    return domain_.h * u.dot(matrix_ * u);
}

Vector DirichletOperator::resolvent(double beta, const Vector& f) const {
    check_length(f, "resolvent");
    if (!(beta >= 0.0)) throw ParameterError("resolvent requires beta >= 0");
    if (beta == 0.0) return solve(f);
    const auto N = static_cast<Eigen::Index>(size());
    if (alpha_ == 2.0) {
        const double s = 1.0 / (domain_.h * domain_.h);
        TridiagonalCholesky chol(Vector::Constant(N, 2.0 * s + beta), -s);
        Vector v = chol.solve(f);
        Vector r = f - (matrix_ * v + beta * v);
        return v + chol.solve(r);
    }
    Eigen::MatrixXd shifted = matrix_;
    shifted.diagonal().array() += beta;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) throw NumericError("resolvent factorization failed", 0.0);
    throw_if_ill_conditioned(llt.rcond());
    Vector v = llt.solve(f);
    Vector r = f - shifted * v;
    return v + llt.solve(r);
}

double DirichletOperator::rcond() const {
    factor_->ensure(matrix_);
    return factor_->rcond;
}

Solution solve_linear(const DirichletOperator& op, const GridMeasure& mu) {
    if (!mu.domain.same_grid(op.domain())) throw ShapeError("solve_linear: measure lives on a different grid");
    Solution sol;
    sol.domain = op.domain();
    sol.signed_data = !mu.nonnegative();
    const Vector q = mu.density();
    sol.u = op.solve(q);
    const double qnorm = q.cwiseAbs().maxCoeff();
    const double res = (op.apply(sol.u) - q).cwiseAbs().maxCoeff();
    sol.residual = qnorm > 0.0 ? res / qnorm : res;
    if (res > 1e-10 * qnorm + op.rounding_floor(sol.u.cwiseAbs().maxCoeff())) {
        std::ostringstream os;
        os << "linear solve residual " << sol.residual << " exceeds 1e-10";
        throw NumericError(os.str(), op.rcond());
    }
    return sol;
}

}  // namespace fraclab
