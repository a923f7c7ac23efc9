#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "advda/adversarial.hpp"
#include "advda/errors.hpp"
#include "oracles.hpp"

using namespace advda;

namespace {

double linf(const std::vector<double>& a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        m = std::max(m, std::abs(a[j] - b[j]));
    }
    return m;
}

double single_loss(const std::vector<double>& theta, const std::vector<double>& x, double y) {
    return nll_loss(ModelParams(theta), Matrix(1, x.size(), x), std::vector<double>{y});
}

}  // namespace

TEST_CASE("AdvConfig validation") {
    CHECK_NOTHROW(AdvConfig{}.validate());
    CHECK_THROWS_AS((AdvConfig{-0.1, 20, 1.0}.validate()), InvalidInput);
    CHECK_THROWS_AS((AdvConfig{0.1, 0, 1.0}.validate()), InvalidInput);
    CHECK_THROWS_AS((AdvConfig{0.1, 20, 0.0}.validate()), InvalidInput);
    CHECK_THROWS_AS((AdvConfig{0.1, 20, 1.5}.validate()), InvalidInput);
    CHECK_NOTHROW((AdvConfig{0.0, 1, 1.0}.validate()));
}

TEST_CASE("clip_linf") {
    const std::vector<double> o{0.0, 0.0};
    CHECK(clip_linf(o, std::vector<double>{0.05, -0.02}, 0.1) == std::vector<double>{0.05, -0.02});
    CHECK(clip_linf(std::vector<double>{0.3, -1.0}, std::vector<double>{5.0, 2.0}, 0.0) ==
          std::vector<double>{0.3, -1.0});
    CHECK(clip_linf(o, std::vector<double>{0.5, -0.03}, 0.1) == std::vector<double>{0.1, -0.03});
    CHECK_THROWS_AS(clip_linf(o, std::vector<double>{1.0}, 0.1), InvalidInput);
}

TEST_CASE("iter_fgsm examples") {
    const std::vector<double> x{0.2, -0.7, 1.1};
    const ModelParams p({0.5, -1.0, 2.0, 0.3});
    CHECK(iter_fgsm(p, x, 1.0, AdvConfig{0.0, 20, 1.0}) == x);
    CHECK(iter_fgsm(ModelParams({0.0, 0.0, 0.0, 4.0}), x, 0.0, AdvConfig{}) == x);

    const auto one = iter_fgsm(ModelParams({1.0, 0.0}), std::vector<double>{0.0}, 0.0, AdvConfig{0.1, 20, 1.0});
    CHECK(one[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(single_loss({1.0, 0.0}, one, 0.0) > std::log(2.0));

    CHECK_THROWS_AS(iter_fgsm(p, std::vector<double>{1.0}, 1.0, AdvConfig{}), InvalidInput);
    CHECK_THROWS_AS(iter_fgsm(p, x, 0.5, AdvConfig{}), InvalidInput);
}

TEST_CASE("iter_fgsm matches the step-by-step reference") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 1 + rng() % 10;
        const auto theta = oracle::random_vector(rng, d + 1, 2.0);
        const auto x = oracle::random_vector(rng, d);
        const double y = (rng() % 2) ? 1.0 : 0.0;
        const double eps = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const std::size_t steps = 1 + rng() % 25;
        const auto got = iter_fgsm(ModelParams(theta), x, y, AdvConfig{eps, steps, 1.0});
        CHECK(got == oracle::fgsm_stepwise(theta, x, y, eps, steps));
    }
}

TEST_CASE("single step equals plain FGSM with step epsilon") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 100; ++t) {
        const auto theta = oracle::random_vector(rng, 5);
        const auto x = oracle::random_vector(rng, 4);
        const double y = (rng() % 2) ? 1.0 : 0.0;
        const auto g = grad_x(ModelParams(theta), x, y);
        auto expect = x;
        for (std::size_t j = 0; j < x.size(); ++j) {
            expect[j] += 0.3 * (g[j] > 0 ? 1.0 : (g[j] < 0 ? -1.0 : 0.0));
        }
        CHECK(iter_fgsm(ModelParams(theta), x, y, AdvConfig{0.3, 1, 1.0}) == expect);
    }
}

TEST_CASE("attack bound and ascent") {
    std::mt19937_64 rng(13);
    for (double eps : {0.01, 0.1, 1.0}) {
        int non_decrease = 0;
        for (int t = 0; t < 1000; ++t) {
            const std::size_t d = 1 + rng() % 10;
            const auto theta = oracle::random_vector(rng, d + 1);
            const auto x = oracle::random_vector(rng, d);
            const double y = (rng() % 2) ? 1.0 : 0.0;
            const auto adv = iter_fgsm(ModelParams(theta), x, y, AdvConfig{eps, 20, 1.0});
            CHECK(linf(adv, x) <= eps + 1e-12);
            non_decrease += single_loss(theta, adv, y) >= single_loss(theta, x, y) - 1e-12;
        }
        CHECK(non_decrease >= 950);
    }
}

TEST_CASE("attack strength grows with epsilon on average") {
    std::mt19937_64 rng(14);
    double gain_small = 0.0;
    double gain_large = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto theta = oracle::random_vector(rng, 6);
        const auto x = oracle::random_vector(rng, 5);
        const double y = (rng() % 2) ? 1.0 : 0.0;
        const double base = single_loss(theta, x, y);
        gain_small += single_loss(theta, iter_fgsm(ModelParams(theta), x, y, AdvConfig{0.01, 20, 1.0}), y) - base;
        gain_large += single_loss(theta, iter_fgsm(ModelParams(theta), x, y, AdvConfig{0.1, 20, 1.0}), y) - base;
    }
    CHECK(gain_large >= gain_small);
}

TEST_CASE("augment_batch") {
    std::mt19937_64 rng(15);
    const ModelParams p(oracle::random_vector(rng, 4));
    const auto X = oracle::random_matrix(rng, 50, 3);
    const auto y = oracle::random_labels(rng, 50);
    const AdvConfig cfg{0.2, 7, 1.0};

    const auto single = augment_batch(p, X.select_rows(std::vector<std::size_t>{4}), std::vector<double>{y[4]}, cfg);
    CHECK(std::vector<double>(single.row(0).begin(), single.row(0).end()) == iter_fgsm(p, X.row(4), y[4], cfg));

    CHECK(augment_batch(p, X, y, AdvConfig{0.0, 7, 1.0}) == X);

    const auto adv = augment_batch(p, X, y, cfg);
    CHECK(adv.rows() == X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        CHECK(linf(std::vector<double>(adv.row(i).begin(), adv.row(i).end()), X.row(i)) <= 0.2 + 1e-12);
        CHECK(std::vector<double>(adv.row(i).begin(), adv.row(i).end()) == iter_fgsm(p, X.row(i), y[i], cfg));
    }
    CHECK(augment_batch(p, X, y, cfg) == adv);
    CHECK_THROWS_AS(augment_batch(p, Matrix(), std::vector<double>{}, cfg), InvalidInput);
}
