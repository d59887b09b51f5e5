#include "idrkit/smoothing_spline.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "idrkit/errors.hpp"

namespace idrkit {

double SmoothingSplineFit::derivative_at_knot(std::size_t i) const {
    const std::size_t n = x.size();
    if (i + 1 < n) {
        const double h = x[i + 1] - x[i];
        return (fitted[i + 1] - fitted[i]) / h - h * (2.0 * second[i] + second[i + 1]) / 6.0;
    }
    const double h = x[n - 1] - x[n - 2];
    return (fitted[n - 1] - fitted[n - 2]) / h + h * (second[n - 2] + 2.0 * second[n - 1]) / 6.0;
}

std::vector<double> SmoothingSplineFit::derivatives() const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = derivative_at_knot(i);
    return out;
}

SmoothingSplineFit fit_smoothing_spline(std::span<const double> x, std::span<const double> y, double target_df,
                                        double df_tolerance) {
    const auto n = static_cast<Eigen::Index>(x.size());
    if (n < 3 || y.size() != x.size()) throw DomainError("smoothing spline needs >= 3 points and matching y");
    if (!(target_df >= 2.0 && target_df <= static_cast<double>(n))) {
        throw DomainError("smoothing spline df must lie in [2, n]");
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        if (!(x[i] > x[i - 1])) throw DomainError("smoothing spline abscissae must be strictly increasing");
    }

    // Reinsch form: K = Q R^{-1} Q^T, value vector f = (I + lambda K)^{-1} y.
    const Eigen::Index m = n - 2;
    Eigen::VectorXd h(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) h(i) = x[i + 1] - x[i];

    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, m);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        Q(j, j) = 1.0 / h(j);
        Q(j + 1, j) = -1.0 / h(j) - 1.0 / h(j + 1);
        Q(j + 2, j) = 1.0 / h(j + 1);
        R(j, j) = (h(j) + h(j + 1)) / 3.0;
        if (j + 1 < m) {
            R(j, j + 1) = h(j + 1) / 6.0;
            R(j + 1, j) = h(j + 1) / 6.0;
        }
    }
    const Eigen::LLT<Eigen::MatrixXd> r_chol(R);
    const Eigen::MatrixXd K = Q * r_chol.solve(Q.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (K + K.transpose()));
    // Constants and linear functions span the null space of K exactly.
    Eigen::VectorXd d = eig.eigenvalues().cwiseMax(0.0);
    d(0) = 0.0;
    d(1) = 0.0;

    auto df_of = [&](double log_lambda) {
        const double lambda = std::exp(log_lambda);
        double tr = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) tr += 1.0 / (1.0 + lambda * d(k));
        return tr;
    };

    // df is decreasing in lambda: bisect on log(lambda).
    double lo = -60.0;
    double hi = 60.0;
    double mid = 0.0;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double df = df_of(mid);
        if (std::fabs(df - target_df) < df_tolerance) break;
        if (df > target_df) lo = mid; else hi = mid;
    }

    const double lambda = std::exp(mid);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    // Reinsch: (R + lambda Q^T Q) gamma = Q^T y, f = y - lambda Q gamma.
    const Eigen::MatrixXd system = R + lambda * (Q.transpose() * Q);
    const Eigen::VectorXd gamma = system.llt().solve(Q.transpose() * yv);
    const Eigen::VectorXd f = yv - lambda * (Q * gamma);

    SmoothingSplineFit out;
    out.x.assign(x.begin(), x.end());
    out.fitted.assign(f.data(), f.data() + n);
    out.second.assign(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index j = 0; j < m; ++j) out.second[static_cast<std::size_t>(j + 1)] = gamma(j);
    out.lambda = lambda;
    out.df = df_of(mid);
    return out;
}

}  // namespace idrkit
