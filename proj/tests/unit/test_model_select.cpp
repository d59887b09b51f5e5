#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "idrkit/errors.hpp"
#include "idrkit/model_select.hpp"
#include "idrkit/rank_transform.hpp"
#include "idrkit/stats_dist.hpp"
#include "test_support.hpp"

using namespace idrkit;
using doctest::Approx;

namespace {

FitConfig quick_fit() {
    FitConfig c;
    c.n_inits = 2;
    c.rng_seed = 3;
    return c;
}

}  // namespace

TEST_SUITE("model_select") {

TEST_CASE("perfect agreement hits the correlation clamp") {
    const auto r = rank_scores(ScoredPairSet(test::iota_scores(500), test::iota_scores(500)));
    CHECK(fit_one_component(r).rho == Approx(0.999));
}

TEST_CASE("independent ranks give a correlation near zero") {
    const auto r = rank_scores(test::independent_scores(10000, 11));
    CHECK(std::fabs(fit_one_component(r).rho) < 0.03);
}

TEST_CASE("bivariate normal data recovers its correlation") {
    const auto r = rank_scores(test::gaussian_scores(10000, 0.66, 12));
    CHECK(std::fabs(fit_one_component(r).rho - 0.66) < 0.02);
}

TEST_CASE("too few signals") {
    CHECK_THROWS_AS(fit_one_component(rank_scores(test::gaussian_scores(49, 0.5, 1))), DomainError);
    CHECK_NOTHROW(fit_one_component(rank_scores(test::gaussian_scores(50, 0.5, 1))));
}

TEST_CASE("Brent search agrees with a fine grid") {
    const auto r = rank_scores(test::gaussian_scores(800, -0.3, 21));
    std::vector<double> z1, z2;
    for (std::size_t i = 0; i < r.size(); ++i) {
        z1.push_back(normal_quantile(r.u1[i]));
        z2.push_back(normal_quantile(r.u2[i]));
    }
    double best_rho = 0.0, best_ll = -std::numeric_limits<double>::infinity();
    for (int k = -999; k <= 999; ++k) {
        const double rho = k / 1000.0;
        const double ll = gaussian_copula_log_likelihood(z1, z2, rho);
        if (ll > best_ll) { best_ll = ll; best_rho = rho; }
    }
    const auto fit = fit_one_component(r);
    CHECK(std::fabs(fit.rho - best_rho) <= 0.001);
    CHECK(fit.loglik >= best_ll - 1e-9);
    CHECK(fit.loglik == Approx(gaussian_copula_log_likelihood(z1, z2, fit.rho)));
}

TEST_CASE("copula log-likelihood matches the density ratio") {
    const std::vector<double> z1{0.3, -1.2, 2.0}, z2{0.1, -0.4, 1.1};
    double expect = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        expect += bivariate_normal_log_density(z1[i], z2[i], {0.0, 1.0, 0.45}) - normal_log_pdf(z1[i]) -
                  normal_log_pdf(z2[i]);
    }
    CHECK(gaussian_copula_log_likelihood(z1, z2, 0.45) == Approx(expect).epsilon(1e-12));
    CHECK(gaussian_copula_log_likelihood(z1, z2, 0.0) == Approx(0.0).epsilon(1e-14));
}

TEST_CASE("add-one p-value") {
    CHECK(bootstrap_p_value({1.0, 2.0, 3.0}, 2.5) == Approx(2.0 / 4.0));
    CHECK(bootstrap_p_value({1.0, 2.0, 3.0}, 10.0) == Approx(1.0 / 4.0));
    CHECK(bootstrap_p_value({1.0, 2.0, 3.0}, 2.0) == Approx(3.0 / 4.0));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(bootstrap_p_value({inf}, 1e6) == Approx(1.0));
}

TEST_CASE("a single bootstrap draw gives p of one half or one") {
    const auto r = rank_scores(test::gaussian_scores(200, 0.6, 4));
    const auto res = bootstrap_lrt(r, 1, 9, quick_fit());
    CHECK(res.n_bootstrap == 1);
    REQUIRE(res.bootstrap_stats.size() == 1);
    CHECK((res.p_value == 0.5 || res.p_value == 1.0));
    CHECK(res.two_log_lambda == Approx(2.0 * (res.loglik_alt - res.loglik_null)));
    CHECK(res.negative_statistic == (res.two_log_lambda < 0.0));
    CHECK_THROWS_AS(bootstrap_lrt(r, 0, 9, quick_fit()), DomainError);
}

TEST_CASE("bootstrap is reproducible and thread independent") {
    const auto r = rank_scores(test::gaussian_scores(200, 0.6, 5));
    auto cfg = quick_fit();
    const auto a = bootstrap_lrt(r, 4, 17, cfg);
    const auto b = bootstrap_lrt(r, 4, 17, cfg);
    cfg.threads = 3;
    const auto c = bootstrap_lrt(r, 4, 17, cfg);
    CHECK(a.bootstrap_stats == b.bootstrap_stats);
    CHECK(a.bootstrap_stats == c.bootstrap_stats);
    CHECK(a.p_value == c.p_value);
    const auto d = bootstrap_lrt(r, 4, 18, quick_fit());
    CHECK(d.bootstrap_stats != a.bootstrap_stats);
    CHECK(d.two_log_lambda == a.two_log_lambda);
}

TEST_CASE("the alternative nests the null") {
    const auto r = rank_scores(test::gaussian_scores(400, 0.5, 6));
    const auto res = bootstrap_lrt(r, 2, 1, quick_fit());
    CHECK(res.two_log_lambda >= -kNegativeStatTolerance);
    for (double s : res.bootstrap_stats) CHECK(s >= -kNegativeStatTolerance);
}

}
