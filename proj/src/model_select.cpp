#include "idrkit/model_select.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/tools/minima.hpp>

#include "idrkit/errors.hpp"
#include "idrkit/parallel.hpp"
#include "idrkit/random.hpp"
#include "idrkit/stats_dist.hpp"

namespace idrkit {

namespace {

constexpr double kRhoBound = 0.999;
constexpr std::uint64_t kBootstrapStream = 0xb0075ULL;

struct Moments {
    double s11 = 0.0;
    double s22 = 0.0;
    double s12 = 0.0;
    double n = 0.0;
};

Moments moments(const std::vector<double>& z1, const std::vector<double>& z2) {
    Moments m;
    for (std::size_t i = 0; i < z1.size(); ++i) {
        m.s11 += z1[i] * z1[i];
        m.s22 += z2[i] * z2[i];
        m.s12 += z1[i] * z2[i];
    }
    m.n = static_cast<double>(z1.size());
    return m;
}

double copula_ll(const Moments& m, double rho) {
    const double one_minus = 1.0 - rho * rho;
    return -0.5 * m.n * std::log(one_minus) - (rho * rho * (m.s11 + m.s22) - 2.0 * rho * m.s12) / (2.0 * one_minus);
}

struct Draw {
    double stat = std::numeric_limits<double>::infinity();
    bool failed = true;
};

double lrt_statistic(const RankedPairSet& ranked, const FitConfig& config) {
    const FitResult alt = fit(ranked, config);
    const OneComponentFit null = fit_one_component(ranked);
    return 2.0 * (alt.loglik - null.loglik);
}

RankedPairSet draw_null(double rho, std::size_t n, std::uint64_t seed, std::size_t index, std::size_t attempt) {
    auto rng = make_stream(seed, kBootstrapStream, index * (kMaxBootstrapRetries + 1) + attempt);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double c = std::sqrt(1.0 - rho * rho);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = gauss(rng);
        b[i] = rho * a[i] + c * gauss(rng);
    }
    return rank_scores(ScoredPairSet(std::move(a), std::move(b)));
}

}  // namespace

double gaussian_copula_log_likelihood(const std::vector<double>& z1, const std::vector<double>& z2, double rho) {
    if (z1.size() != z2.size()) throw DomainError("normal score vectors differ in length");
    if (!(std::fabs(rho) < 1.0)) throw DomainError("correlation must lie in (-1, 1)");
    return copula_ll(moments(z1, z2), rho);
}

OneComponentFit fit_one_component(const RankedPairSet& ranked) {
    const std::size_t n = ranked.u1.size();
    if (n < kMinOneComponentSignals) throw DomainError("one-component fit needs at least 50 signals");
    std::vector<double> z1(n), z2(n);
    for (std::size_t i = 0; i < n; ++i) {
        z1[i] = normal_quantile(ranked.u1[i]);
        z2[i] = normal_quantile(ranked.u2[i]);
    }
    const Moments m = moments(z1, z2);
    const auto [rho, neg_ll] = boost::math::tools::brent_find_minima(
        [&](double r) { return -copula_ll(m, r); }, -kRhoBound, kRhoBound, std::numeric_limits<double>::digits / 2);
    // Brent never evaluates the endpoints; compare against the clamp explicitly.
    OneComponentFit best{rho, -neg_ll};
    for (double edge : {-kRhoBound, kRhoBound}) {
        const double ll = copula_ll(m, edge);
        if (ll > best.loglik) best = {edge, ll};
    }
    return best;
}

double bootstrap_p_value(const std::vector<double>& bootstrap_stats, double observed) {
    std::size_t at_least = 0;
    for (double s : bootstrap_stats) {
        if (s >= observed) ++at_least;
    }
    return static_cast<double>(at_least + 1) / static_cast<double>(bootstrap_stats.size() + 1);
}

LrtResult bootstrap_lrt(const RankedPairSet& ranked, std::size_t n_bootstrap, std::uint64_t seed,
                        const FitConfig& fit_config) {
    if (n_bootstrap < 1) throw DomainError("n_bootstrap must be at least 1");
    fit_config.validate();

    LrtResult out;
    const FitResult alt = fit(ranked, fit_config);
    const OneComponentFit null = fit_one_component(ranked);
    out.rho_null = null.rho;
    out.loglik_null = null.loglik;
    out.loglik_alt = alt.loglik;
    out.two_log_lambda = 2.0 * (alt.loglik - null.loglik);
    out.negative_statistic = out.two_log_lambda < 0.0;
    out.n_bootstrap = n_bootstrap;

    // Parallelism goes to the replicates; each replicate fits sequentially.
    FitConfig inner = fit_config;
    inner.threads = 1;
    const std::size_t n = ranked.u1.size();
    std::vector<Draw> draws(n_bootstrap);
    parallel_for(n_bootstrap, fit_config.threads, [&](std::size_t b) {
        for (std::size_t attempt = 0; attempt <= kMaxBootstrapRetries; ++attempt) {
            try {
                const RankedPairSet sample = draw_null(null.rho, n, seed, b, attempt);
                draws[b] = {lrt_statistic(sample, inner), false};
                return;
            } catch (const DegenerateComponent&) {
            } catch (const NumericalUnderflow&) {
            }
        }
    });

    out.bootstrap_stats.reserve(n_bootstrap);
    for (const Draw& d : draws) {
        out.bootstrap_stats.push_back(d.stat);
        if (d.failed) ++out.failed_draws;
    }
    out.p_value = bootstrap_p_value(out.bootstrap_stats, out.two_log_lambda);
    return out;
}

}  // namespace idrkit
