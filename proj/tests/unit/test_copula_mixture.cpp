#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "idrkit/copula_mixture.hpp"
#include "idrkit/errors.hpp"
#include "idrkit/stats_dist.hpp"
#include "test_support.hpp"

using namespace idrkit;
using doctest::Approx;

namespace {

// Latent draws from the two-component model at theta.
PseudoData sample_model(const Theta& theta, std::size_t n, std::uint64_t seed, std::vector<int>* labels = nullptr) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::bernoulli_distribution k(theta.pi1);
    PseudoData d;
    const double s = std::sqrt(theta.sigma1_sq);
    const double c = std::sqrt(1.0 - theta.rho1 * theta.rho1);
    for (std::size_t i = 0; i < n; ++i) {
        const bool rep = k(rng);
        const double a = g(rng), b = g(rng);
        if (labels) labels->push_back(rep);
        if (rep) {
            d.z1.push_back(theta.mu1 + s * a);
            d.z2.push_back(theta.mu1 + s * (theta.rho1 * a + c * b));
        } else {
            d.z1.push_back(a);
            d.z2.push_back(b);
        }
    }
    return d;
}

RankedPairSet ranks_of(const PseudoData& d) { return rank_scores(ScoredPairSet(d.z1, d.z2)); }

double naive_density(double x, double y, const Theta& t) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double h0 = std::exp(-0.5 * (x * x + y * y)) / two_pi;
    const double a = x - t.mu1, b = y - t.mu1, r = t.rho1, v = t.sigma1_sq;
    const double q = (a * a - 2.0 * r * a * b + b * b) / (v * (1.0 - r * r));
    const double h1 = std::exp(-0.5 * q) / (two_pi * v * std::sqrt(1.0 - r * r));
    return (1.0 - t.pi1) * h0 + t.pi1 * h1;
}

const Theta kS1{0.65, 2.5, 1.0, 0.84};

}  // namespace

TEST_SUITE("copula_mixture") {

TEST_CASE("marginal mixture cdf values") {
    const Theta sym{0.5, 2.0, 1.0, 0.3};
    CHECK(marginal_mixture_cdf(1.0, sym) == Approx(0.5).epsilon(1e-15));
    CHECK(marginal_mixture_cdf(0.0, kS1) == Approx(0.17903).epsilon(1e-4));
    CHECK(marginal_mixture_cdf(0.0, kS1) == Approx(0.65 * normal_cdf(-2.5) + 0.35 * 0.5).epsilon(1e-15));
    CHECK(marginal_mixture_cdf(-60.0, kS1) == 0.0);
    CHECK(marginal_mixture_cdf(60.0, kS1) == 1.0);
    const Theta wide{0.3, 1.5, 2.5, 0.5};
    for (double z : {-3.0, 0.0, 1.0, 4.0}) {
        CHECK(marginal_mixture_cdf(z, wide) + marginal_mixture_sf(z, wide) == Approx(1.0).epsilon(1e-15));
        const double pdf = std::exp(marginal_mixture_log_pdf(z, wide));
        const double h = 1e-5;
        CHECK(pdf == Approx((marginal_mixture_cdf(z + h, wide) - marginal_mixture_cdf(z - h, wide)) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("marginal quantile inverts the cdf on a fine grid") {
    const std::vector<Theta> thetas{{0.5, 2.0, 1.0, 0.5}, kS1, {0.05, 2.5, 1.0, 0.84}, {0.3, 3.5, 0.3, 0.4},
                                    {0.9, 1.0, 2.0, 0.9}, {1e-4, 4.0, 1e-3, 0.5}};
    for (const auto& t : thetas) {
        double prev = -INFINITY;
        for (int k = 1; k <= 999; ++k) {
            const double u = k / 1000.0;
            const double z = marginal_mixture_quantile(u, t);
            CHECK(std::fabs(marginal_mixture_cdf(z, t) - u) <= 1e-9);
            CHECK(z > prev);
            prev = z;
        }
    }
    CHECK(marginal_mixture_quantile(0.5, Theta{0.5, 2.0, 1.0, 0.1}) == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(marginal_mixture_quantile(0.0, kS1), DomainError);
    CHECK_THROWS_AS(marginal_mixture_quantile(1.0, kS1), DomainError);
}

TEST_CASE("pseudo-data maps the median rank to the mixture median") {
    const auto r = rank_scores(ScoredPairSet({1.0, 2.0, 3.0}, {3.0, 2.0, 1.0}));
    const auto p = compute_pseudo_data(r, Theta{0.5, 2.0, 1.0, 0.5});
    CHECK(p.z1[1] == Approx(1.0).epsilon(1e-12));
    CHECK(p.z2[1] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pseudo-data at the true parameters matches mixture moments") {
    const std::size_t n = 10000;
    const auto latent = sample_model(kS1, n, 77);
    const auto p = compute_pseudo_data(ranks_of(latent), kS1);
    const double mean = kS1.pi1 * kS1.mu1;
    const double second = kS1.pi1 * (kS1.sigma1_sq + kS1.mu1 * kS1.mu1) + (1.0 - kS1.pi1);
    const double var = second - mean * mean;
    double m = 0.0, s = 0.0;
    for (double z : p.z1) m += z;
    m /= n;
    for (double z : p.z1) s += (z - m) * (z - m);
    s /= n - 1;
    CHECK(std::fabs(m - mean) < 3.0 * std::sqrt(var / n));
    // var of the sample variance ~ (m4 - var^2) / n; bound m4 loosely by 3 second^2
    CHECK(std::fabs(s - var) < 3.0 * std::sqrt(3.0 * second * second / n));
}

TEST_CASE("pseudo-data is unchanged by monotone score transforms") {
    const auto latent = sample_model(kS1, 500, 3);
    std::vector<double> a, b;
    for (double z : latent.z1) a.push_back(std::exp(z));
    for (double z : latent.z2) b.push_back(5.0 * z - 2.0);
    const auto p0 = compute_pseudo_data(ranks_of(latent), kS1);
    const auto p1 = compute_pseudo_data(rank_scores(ScoredPairSet(a, b)), kS1);
    CHECK(p0.z1 == p1.z1);
    CHECK(p0.z2 == p1.z2);
}

TEST_CASE("log-likelihood against a direct evaluation") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> pi(0.05, 0.95), mu(0.5, 4), v(0.3, 3), rho(0.0, 0.95), z(-3, 6);
    for (int trial = 0; trial < 50; ++trial) {
        const Theta t{pi(rng), mu(rng), v(rng), rho(rng)};
        PseudoData d;
        for (int i = 0; i < 40; ++i) {
            d.z1.push_back(z(rng));
            d.z2.push_back(z(rng));
        }
        double ref = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) ref += std::log(naive_density(d.z1[i], d.z2[i], t));
        CHECK(std::fabs(log_likelihood(d, t) - ref) < 1e-10 * std::max(1.0, std::fabs(ref)));
        double marg = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            marg += marginal_mixture_log_pdf(d.z1[i], t) + marginal_mixture_log_pdf(d.z2[i], t);
        }
        CHECK(copula_log_likelihood(d, t) == Approx(ref - marg).epsilon(1e-12));
    }
}

TEST_CASE("log-likelihood degenerate limit and permutation invariance") {
    PseudoData one;
    one.z1 = {0.0};
    one.z2 = {0.0};
    CHECK(log_likelihood(one, Theta{1e-4, 30.0, 1.0, 0.5}) == Approx(-std::log(2.0 * std::numbers::pi)).epsilon(1e-4));
    auto d = sample_model(kS1, 300, 5);
    const double ll = log_likelihood(d, kS1);
    std::mt19937_64 rng(1);
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    PseudoData shuffled;
    for (std::size_t i : idx) {
        shuffled.z1.push_back(d.z1[i]);
        shuffled.z2.push_back(d.z2[i]);
    }
    CHECK(log_likelihood(shuffled, kS1) == Approx(ll).epsilon(1e-13));
}

TEST_CASE("EM on single-component data runs to the clamp with sample moments") {
    const Theta only{1.0, 6.0, 1.2, 0.5};  // every draw from the reproducible component
    auto d = sample_model(only, 2000, 8);
    const auto r = em_inner(d, Theta{0.5, 3.0, 1.0, 0.3}, 1e-10, 500);
    CHECK(r.theta.pi1 == kPiMax);
    const double n = static_cast<double>(d.size());
    double mu = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) mu += d.z1[i] + d.z2[i];
    mu /= 2.0 * n;
    double sq = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        sq += 0.5 * ((d.z1[i] - mu) * (d.z1[i] - mu) + (d.z2[i] - mu) * (d.z2[i] - mu));
        cross += (d.z1[i] - mu) * (d.z2[i] - mu);
    }
    CHECK(r.theta.mu1 == Approx(mu).epsilon(1e-6));
    CHECK(r.theta.sigma1_sq == Approx(sq / n).epsilon(1e-6));
    CHECK(r.theta.rho1 == Approx(cross / sq).epsilon(1e-6));
}

TEST_CASE("EM never decreases the log-likelihood") {
    const auto d = sample_model(kS1, 1000, 10);
    const auto one = em_inner(d, kS1, 1e-12, 1);
    REQUIRE(one.loglik_trace.size() == 2);
    CHECK(one.loglik_trace[1] >= one.loglik_trace[0] - 1e-9);
    FitConfig cfg;
    for (std::size_t k = 0; k < 25; ++k) {
        const auto r = em_inner(d, random_initial_theta(cfg, k), 1e-8, 200);
        for (std::size_t i = 1; i < r.loglik_trace.size(); ++i) {
            CHECK(r.loglik_trace[i] >= r.loglik_trace[i - 1] - 1e-9);
        }
    }
}

TEST_CASE("EM starves the reproducible component on pure noise") {
    PseudoData d;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (int i = 0; i < 40; ++i) {
        d.z1.push_back(g(rng));
        d.z2.push_back(g(rng));
    }
    CHECK_THROWS_AS(em_inner(d, Theta{0.1, 8.0, 0.1, 0.5}, 1e-6, 50), DegenerateComponent);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(Theta({0.0, 1.0, 1.0, 0.5}).validate(), DomainError);
    CHECK_THROWS_AS(Theta({0.5, 1.0, 0.0, 0.5}).validate(), DomainError);
    CHECK_THROWS_AS(Theta({0.5, 1.0, 1.0, 1.0}).validate(), DomainError);
    const Theta c = Theta{0.99999, 1.0, 1.0, 0.9999}.clamped();
    CHECK(c.pi1 == kPiMax);
    CHECK(c.rho1 == kRhoMax);
    FitConfig bad;
    bad.n_inits = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = FitConfig{};
    bad.outer_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("random starts are reproducible and inside the ranges") {
    FitConfig cfg;
    cfg.rng_seed = 42;
    for (std::size_t k = 0; k < 20; ++k) {
        const Theta a = random_initial_theta(cfg, k);
        CHECK(a == random_initial_theta(cfg, k));
        CHECK(a.pi1 >= 0.05);
        CHECK(a.pi1 <= 0.95);
        CHECK(a.mu1 >= 1.0);
        CHECK(a.mu1 <= 4.0);
        CHECK(a.sigma1_sq >= 0.5);
        CHECK(a.sigma1_sq <= 2.0);
        CHECK(a.rho1 >= 0.1);
        CHECK(a.rho1 <= 0.9);
    }
    CHECK_FALSE(random_initial_theta(cfg, 0) == random_initial_theta(cfg, 1));
}

TEST_CASE("fit is symmetric, rank invariant and thread independent") {
    const auto latent = sample_model(kS1, 1500, 31);
    FitConfig cfg;
    cfg.n_inits = 4;
    const auto base = fit(ranks_of(latent), cfg);
    CHECK(base.theta.pi1 == Approx(0.65).epsilon(0.1));

    PseudoData swapped{latent.z2, latent.z1};
    const auto sw = fit(ranks_of(swapped), cfg);
    CHECK(sw.theta == base.theta);
    CHECK(sw.posterior == base.posterior);

    std::vector<double> a, b;
    for (double z : latent.z1) a.push_back(std::atan(z) * 3.0 + 1.0);
    for (double z : latent.z2) b.push_back(std::exp(2.0 * z));
    const auto tr = fit(rank_scores(ScoredPairSet(a, b)), cfg);
    CHECK(tr.theta == base.theta);
    CHECK(tr.loglik == base.loglik);
    CHECK(tr.posterior == base.posterior);

    cfg.threads = 3;
    const auto par = fit(ranks_of(latent), cfg);
    CHECK(par.theta == base.theta);
    CHECK(par.init_index == base.init_index);
    CHECK(par.loglik_trace == base.loglik_trace);
}

TEST_CASE("fit result bookkeeping") {
    const auto latent = sample_model(kS1, 800, 6);
    FitConfig cfg;
    cfg.n_inits = 3;
    const auto r = fit(ranks_of(latent), cfg);
    CHECK(r.starts.size() == 3);
    CHECK_FALSE(r.small_sample);
    CHECK(r.loglik == r.loglik_trace.back());
    for (const auto& s : r.starts) {
        if (!s.failed) CHECK(s.loglik <= r.loglik);
        for (const auto& trace : s.inner_traces) {
            for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-9);
        }
    }
    for (double g : r.posterior) {
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
    }
    CHECK(r.n_outer_iters <= cfg.outer_max_iters);
}

TEST_CASE("tiny inputs degenerate or warn") {
    const auto tiny = rank_scores(test::gaussian_scores(12, 0.5, 1));
    FitConfig cfg;
    cfg.n_inits = 3;
    CHECK_THROWS_AS(fit(tiny, cfg), DegenerateComponent);
    const auto small = sample_model(kS1, 40, 2);
    try {
        CHECK(fit(ranks_of(small), cfg).small_sample);
    } catch (const DegenerateComponent&) {
        // acceptable for so few signals
    }
}

TEST_CASE("fit agrees with a local lattice search on its own pseudo-data") {
    const auto latent = sample_model(kS1, 200, 123);
    const auto r = fit(ranks_of(latent), FitConfig{});
    const Theta& t = r.theta;
    const double step = 0.05;
    double best = -INFINITY;
    Theta arg = t;
    for (int a = -4; a <= 4; ++a)
        for (int b = -4; b <= 4; ++b)
            for (int c = -4; c <= 4; ++c)
                for (int d = -4; d <= 4; ++d) {
                    const Theta g{t.pi1 + a * step, t.mu1 + b * step, t.sigma1_sq + c * step, t.rho1 + d * step};
                    if (g.pi1 <= 0 || g.pi1 >= 1 || g.sigma1_sq <= 0 || g.rho1 <= 0 || g.rho1 >= 1) continue;
                    const double ll = log_likelihood(r.pseudo, g);
                    if (ll > best) {
                        best = ll;
                        arg = g;
                    }
                }
    CHECK(std::fabs(arg.pi1 - t.pi1) <= step + 1e-12);
    CHECK(std::fabs(arg.mu1 - t.mu1) <= step + 1e-12);
    CHECK(std::fabs(arg.sigma1_sq - t.sigma1_sq) <= step + 1e-12);
    CHECK(std::fabs(arg.rho1 - t.rho1) <= step + 1e-12);
}

}
