#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "idrkit/copula_mixture.hpp"
#include "idrkit/errors.hpp"
#include "idrkit/idr_selection.hpp"
#include "idrkit/simulate.hpp"
#include "idrkit/stats_dist.hpp"
#include "test_support.hpp"

using namespace idrkit;
using doctest::Approx;

TEST_SUITE("idr_selection") {

TEST_CASE("running mean of sorted local idr") {
    const std::vector<double> idr{0.2, 0.01, 0.04, 0.02};
    const auto t = idr_table(idr);
    REQUIRE(t.size() == 4);
    CHECK(t.entries[0].index == 1);
    CHECK(t.entries[1].index == 3);
    CHECK(t.entries[2].index == 2);
    CHECK(t.entries[3].index == 0);
    CHECK(t.cumulative_idr[0] == Approx(0.01));
    CHECK(t.cumulative_idr[1] == Approx(0.015));
    CHECK(t.cumulative_idr[2] == Approx(0.07 / 3.0));
    CHECK(t.cumulative_idr[3] == Approx(0.0675));
    for (std::size_t k = 0; k < 4; ++k) CHECK(t.entries[k].rank_by_idr == k + 1);
    CHECK(select_at_idr(t, 0.05) == 3);
    CHECK(select_at_idr(t, 0.005) == 0);
    CHECK(select_at_idr(t, 0.0675) == 4);
    CHECK(select_at_idr(t, 0.5) == 4);
}

TEST_CASE("constant idr gives a constant running mean") {
    const std::vector<double> idr(1000, 0.1);
    const auto t = idr_table(idr);
    for (double c : t.cumulative_idr) CHECK(c == 0.1);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(t.entries[k].index == k);
}

TEST_CASE("running mean is nondecreasing and ends at the mean") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> idr(5000);
    for (double& v : idr) v = u(rng) * u(rng);
    const auto t = idr_table(idr);
    for (std::size_t k = 1; k < t.size(); ++k) CHECK(t.cumulative_idr[k] >= t.cumulative_idr[k - 1]);
    const double mean = std::accumulate(idr.begin(), idr.end(), 0.0) / idr.size();
    CHECK(t.cumulative_idr.back() == Approx(mean).epsilon(1e-12));
    std::size_t prev = 0;
    for (double alpha = 0.01; alpha < 0.99; alpha += 0.01) {
        const std::size_t l = select_at_idr(t, alpha);
        CHECK(l >= prev);
        if (l > 0) CHECK(t.cumulative_idr[l - 1] <= alpha);
        if (l < t.size()) CHECK(t.cumulative_idr[l] > alpha);
        prev = l;
    }
}

TEST_CASE("local idr complements the posterior") {
    const auto r = rank_scores(test::gaussian_scores(500, 0.7, 2));
    const Theta theta{0.4, 1.5, 1.0, 0.7};
    const auto idr = local_idr(r, theta);
    const auto post = posterior_reproducible(compute_pseudo_data(r, theta), theta);
    for (std::size_t i = 0; i < idr.size(); ++i) {
        CHECK(idr[i] >= 0.0);
        CHECK(idr[i] <= 1.0);
        CHECK(idr[i] + post[i] == Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("no-noise limit gives idr near zero") {
    const auto r = rank_scores(test::gaussian_scores(300, 0.8, 5));
    for (double v : local_idr(r, Theta{kPiMax, 2.0, 1.0, 0.8})) CHECK(v < 0.01);
}

TEST_CASE("mean idr at the true parameters estimates pi0") {
    const auto data = simulate_dataset(scenario_preset(ScenarioName::S1, 10000, 3));
    std::vector<double> a, b;
    for (double p : data.pvalues1) a.push_back(-p);
    for (double p : data.pvalues2) b.push_back(-p);
    const auto r = rank_scores(ScoredPairSet(a, b));
    const auto idr = local_idr(r, scenario_preset(ScenarioName::S1).true_theta());
    const double mean = std::accumulate(idr.begin(), idr.end(), 0.0) / idr.size();
    CHECK(std::fabs(mean - 0.35) < 0.02);
}

TEST_CASE("ordering by idr equals ordering by the likelihood ratio") {
    const auto r = rank_scores(test::gaussian_scores(2000, 0.6, 14));
    const Theta theta{0.5, 2.0, 1.3, 0.6};
    const auto table = idr_table(r, theta);
    const auto pseudo = compute_pseudo_data(r, theta);
    std::vector<double> lr(pseudo.size());
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
        const double h0 = bivariate_normal_log_density(pseudo.z1[i], pseudo.z2[i], {0.0, 1.0, 0.0});
        const double h1 = bivariate_normal_log_density(pseudo.z1[i], pseudo.z2[i], {2.0, 1.3, 0.6});
        lr[i] = std::log(0.5) + h0 - (std::log(0.5) + h1);
    }
    std::vector<std::size_t> by_lr(lr.size());
    std::iota(by_lr.begin(), by_lr.end(), 0);
    std::stable_sort(by_lr.begin(), by_lr.end(), [&](std::size_t x, std::size_t y) { return lr[x] < lr[y]; });
    // compare away from numerically tied ratios
    std::size_t agree = 0;
    for (std::size_t k = 0; k < lr.size(); ++k) agree += table.entries[k].index == by_lr[k];
    CHECK(agree >= lr.size() - 10);
    for (std::size_t k = 1; k < lr.size(); ++k) {
        CHECK(lr[table.entries[k].index] >= lr[table.entries[k - 1].index] - 1e-9);
    }
}

TEST_CASE("scores are carried into the table") {
    const ScoredPairSet s({5.0, 1.0, 3.0, 2.0, 4.0}, {4.0, 1.0, 2.0, 3.0, 5.0});
    const auto r = rank_scores(s);
    const auto t = idr_table(s, r, Theta{0.5, 1.0, 1.0, 0.5});
    for (const auto& e : t.entries) {
        CHECK(e.score1 == s.score1()[e.index]);
        CHECK(e.score2 == s.score2()[e.index]);
    }
}

TEST_CASE("argument checks") {
    const std::vector<double> idr{0.1, 0.2};
    const auto t = idr_table(idr);
    CHECK_THROWS_AS(select_at_idr(t, 0.0), DomainError);
    CHECK_THROWS_AS(select_at_idr(t, 1.0), DomainError);
    const std::vector<double> bad{0.1, 1.2};
    CHECK_THROWS_AS(idr_table(bad), DomainError);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(idr_table(idr, one, one), DomainError);
}

}
