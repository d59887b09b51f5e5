#include "idrkit/stats_dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "idrkit/errors.hpp"

namespace idrkit {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kInvSqrtTwoPi = 0.39894228040143267794;

// Wichura (1988) AS241, PPND16.
double quantile_as241(double p) {
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                    45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                    21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = std::sqrt(-std::log(q < 0 ? p : 1.0 - p));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((r * 7.7454501427834140764e-4 + .0227238449892691845833) * r + .24178072517745061177) * r +
                   1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
                4.6303378461565452959) * r + 1.42343711074968357734) /
              (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + .0151986665636164571966) * r +
                   .14810397642748007459) * r + .68976733498510000455) * r + 1.6763848301838038494) * r +
                2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + .0012426609473880784386) * r +
                   .026532189526576123093) * r + .29656057182850489123) * r + 1.7848265399172913358) * r +
                5.4637849111641143699) * r + 6.6579046435011037772) /
              (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                   7.868691311456132591e-4) * r + .0148753612908506148525) * r + .13692988092273580531) * r +
                .59983220655588793769) * r + 1.0);
    }
    return q < 0 ? -val : val;
}

// Lower tail of t5 at -|x| expressed through phi = atan(sqrt(5) / |x|):
// F(-|x|) = (phi - sin(phi) cos(phi) (1 + 2/3 sin^2(phi))) / pi.
double t5_lower_tail_from_phi(double phi) {
    if (phi < 0.25) {
        const double p2 = phi * phi;
        const double series =
            8.0 / 15.0 +
            p2 * (-16.0 / 63.0 +
                  p2 * (8.0 / 135.0 +
                        p2 * (-272.0 / 31185.0 +
                              p2 * (496.0 / 552825.0 + p2 * (-32.0 / 467775.0 + p2 * (43688.0 / 10854718875.0))))));
        return std::pow(phi, 5) * series / std::numbers::pi;
    }
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    return (phi - s * c * (1.0 + (2.0 / 3.0) * s * s)) / std::numbers::pi;
}

}  // namespace

void BivariateGaussianParams::validate() const {
    if (!(variance > 0.0) || !std::isfinite(variance)) throw DomainError("bivariate normal variance must be > 0");
    if (!(std::fabs(rho) < 1.0)) throw DomainError("bivariate normal correlation must lie in (-1, 1)");
}

double normal_pdf(double z) { return kInvSqrtTwoPi * std::exp(-0.5 * z * z); }

double normal_log_pdf(double z) { return -0.5 * kLogTwoPi - 0.5 * z * z; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

double normal_sf(double z) { return 0.5 * std::erfc(z * std::numbers::sqrt2 / 2.0); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile requires p in (0, 1)");
    double x = quantile_as241(p);
    // one Newton step against the working CDF, taken on the smaller tail
    const double dens = normal_pdf(x);
    if (dens > 0.0) {
        const double err = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
        x -= err / dens;
    }
    return x;
}

double bivariate_normal_log_density(double z1, double z2, const BivariateGaussianParams& params) {
    params.validate();
    const double a = z1 - params.mean;
    const double b = z2 - params.mean;
    const double one_minus_r2 = 1.0 - params.rho * params.rho;
    const double quad = ((a * a + b * b) - 2.0 * params.rho * (a * b)) / (params.variance * one_minus_r2);
    return -kLogTwoPi - std::log(params.variance) - 0.5 * std::log(one_minus_r2) - 0.5 * quad;
}

double bivariate_normal_density(double z1, double z2, const BivariateGaussianParams& params) {
    return std::exp(bivariate_normal_log_density(z1, z2, params));
}

double chisq_survival_even_df(double x, int df) {
    if (df <= 0 || df % 2 != 0) throw DomainError("chisq_survival_even_df requires a positive even df");
    if (!(x >= 0.0)) throw DomainError("chisq_survival_even_df requires x >= 0");
    const double half = 0.5 * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < df / 2; ++k) {
        term *= half / k;
        sum += term;
    }
    return std::min(1.0, std::exp(-half) * sum);
}

double t5_pdf(double x) {
    // Gamma(3) / (sqrt(5 pi) Gamma(5/2)) = 8 / (3 pi sqrt(5))
    constexpr double norm = 8.0 / (3.0 * std::numbers::pi * 2.2360679774997896964);
    const double base = 1.0 + x * x / 5.0;
    return norm / (base * base * base);
}

double t5_cdf(double x) {
    if (std::isnan(x)) throw DomainError("t5_cdf of NaN");
    if (x == 0.0) return 0.5;
    const double phi = std::atan(std::sqrt(5.0) / std::fabs(x));
    const double tail = t5_lower_tail_from_phi(phi);
    return x < 0.0 ? tail : 1.0 - tail;
}

double t5_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("t5_quantile requires p in (0, 1)");
    if (p == 0.5) return 0.0;
    // Solve on the lower tail and reflect, so tiny tail areas keep relative precision.
    const bool upper = p > 0.5;
    const double tail = upper ? 1.0 - p : p;

    // tail ~ c |x|^-5 for large |x| gives a starting bracket
    double hi = 0.0;
    double lo = -std::max(1.0, std::pow(9.5 / tail, 0.2));
    while (t5_cdf(lo) > tail) lo *= 2.0;

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = t5_cdf(x) - tail;
        if (f > 0.0) hi = x; else lo = x;
        if (f == 0.0) break;
        double next = x - f / t5_pdf(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-15 * std::max(1.0, std::fabs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    return upper ? -x : x;
}

std::vector<double> bh_adjust(std::span<const double> pvalues) {
    const std::size_t n = pvalues.size();
    for (double p : pvalues) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bh_adjust requires p-values in [0, 1]");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

    std::vector<double> adjusted(n);
    double running = 1.0;
    for (std::size_t k = n; k-- > 0;) {
        const double candidate = pvalues[order[k]] * static_cast<double>(n) / static_cast<double>(k + 1);
        running = std::min(running, candidate);
        adjusted[order[k]] = running;
    }
    return adjusted;
}

}  // namespace idrkit
