#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "advda/core_model.hpp"
#include "advda/errors.hpp"
#include "oracles.hpp"

using namespace advda;

TEST_CASE("sigmoid") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(std::abs(sigmoid(40.0) - 1.0) <= 1e-15);
    // 1 / (1 + e^2)
    CHECK(sigmoid(-2.0) == doctest::Approx(0.11920292202211755).epsilon(1e-15));
    CHECK(std::isfinite(sigmoid(-700.0)));
    CHECK(std::isfinite(sigmoid(700.0)));
    CHECK(sigmoid(-700.0) > 0.0);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng);
        const double b = u(rng);
        if (a < b) {
            CHECK(sigmoid(a) <= sigmoid(b));
        }
        CHECK(std::abs(sigmoid(a) - static_cast<double>(oracle::sigmoid_ld(a))) < 1e-15);
    }
}

TEST_CASE("predict_proba") {
    CHECK(predict_proba(ModelParams::zeros(3), std::vector<double>{1.0, -2.0, 5.0}) == 0.5);
    CHECK(predict_proba(ModelParams({1.0, 0.0}), std::vector<double>{0.0}) == 0.5);
    // sigmoid(2 * 1.5 - 1) = sigmoid(2)
    CHECK(predict_proba(ModelParams({2.0, -1.0}), std::vector<double>{1.5}) ==
          doctest::Approx(0.8807970779778823).epsilon(1e-15));
    CHECK_THROWS_AS(predict_proba(ModelParams({1.0, 0.0}), std::vector<double>{1.0, 2.0}), InvalidInput);

    SUBCASE("strictly inside (0, 1) for moderate logits") {
        std::mt19937_64 rng(2);
        for (int i = 0; i < 200; ++i) {
            ModelParams p(oracle::random_vector(rng, 6));
            const auto x = oracle::random_vector(rng, 5, 3.0);
            const double v = predict_proba(p, x);
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }
    }
}

TEST_CASE("ModelParams and HeadBank invariants") {
    CHECK_THROWS_AS(ModelParams(std::vector<double>{}), InvalidInput);
    CHECK_THROWS_AS(ModelParams({1.0, NAN}), InvalidInput);
    CHECK_THROWS_AS(HeadBank(TaskKind::multi_class(3), {ModelParams::zeros(2)}), InvalidInput);
    CHECK_THROWS_AS(HeadBank(TaskKind::multi_label(2), {ModelParams::zeros(2), ModelParams::zeros(3)}),
                    InvalidInput);
    CHECK_THROWS_AS(TaskKind::multi_class(1), InvalidInput);
    CHECK_THROWS_AS(TaskKind::multi_label(0), InvalidInput);
    CHECK(HeadBank::zeros(TaskKind::multi_class(4), 3).num_heads() == 4);
    CHECK(TaskKind::parse("multilabel:25") == TaskKind::multi_label(25));
    CHECK(TaskKind::parse(TaskKind::multi_class(10).to_string()) == TaskKind::multi_class(10));
    CHECK_THROWS_AS(TaskKind::parse("softmax"), InvalidInput);
}

TEST_CASE("nll_loss") {
    std::mt19937_64 rng(3);
    const auto X = oracle::random_matrix(rng, 7, 3);
    const auto y = oracle::random_labels(rng, 7);
    CHECK(nll_loss(ModelParams::zeros(3), X, y) == doctest::Approx(7 * std::log(2.0)).epsilon(1e-14));

    // 2 * -log sigmoid(1)
    const auto X2 = Matrix::from_rows({{1.0}, {-1.0}});
    CHECK(nll_loss(ModelParams({1.0, 0.0}), X2, std::vector<double>{1.0, 0.0}) ==
          doctest::Approx(0.6265233750364456).epsilon(1e-14));

    SUBCASE("confident correct predictions") {
        const auto Xc = Matrix::from_rows({{1.0}, {-1.0}, {1.0}});
        CHECK(nll_loss(ModelParams({40.0, 0.0}), Xc, std::vector<double>{1.0, 0.0, 1.0}) <= 3 * 1e-12);
    }
    SUBCASE("clamped, never infinite") {
        const auto Xc = Matrix::from_rows({{1.0}});
        const double l = nll_loss(ModelParams({800.0, 0.0}), Xc, std::vector<double>{0.0});
        CHECK(std::isfinite(l));
        CHECK(l == doctest::Approx(-std::log(kProbClamp)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(nll_loss(ModelParams::zeros(3), X, std::vector<double>(7, 0.5)), InvalidInput);
    CHECK_THROWS_AS(nll_loss(ModelParams::zeros(2), X, y), InvalidInput);
    CHECK_THROWS_AS(nll_loss(ModelParams::zeros(3), X, std::vector<double>(6, 0.0)), InvalidInput);

    SUBCASE("label flip symmetry") {
        for (int t = 0; t < 50; ++t) {
            const auto theta = oracle::random_vector(rng, 4);
            std::vector<double> neg(theta.size());
            std::vector<double> flipped(y.size());
            for (std::size_t k = 0; k < theta.size(); ++k) {
                neg[k] = -theta[k];
            }
            for (std::size_t i = 0; i < y.size(); ++i) {
                flipped[i] = 1.0 - y[i];
            }
            CHECK(nll_loss(ModelParams(neg), X, flipped) ==
                  doctest::Approx(nll_loss(ModelParams(theta), X, y)).epsilon(1e-12));
        }
    }
}

TEST_CASE("grad_theta") {
    const auto g = grad_theta(ModelParams::zeros(1), Matrix::from_rows({{1.0}}), std::vector<double>{1.0});
    CHECK(g == std::vector<double>{-0.5, -0.5});

    SUBCASE("stationary when labels equal predictions") {
        const auto X = Matrix::from_rows({{0.0}, {0.0}});
        // residuals +0.5 and -0.5 on identical rows cancel
        const auto gz = grad_theta(ModelParams::zeros(1), X, std::vector<double>{1.0, 0.0});
        CHECK(gz[0] == 0.0);
        CHECK(gz[1] == 0.0);
    }

    SUBCASE("finite differences, 100 random instances") {
        std::mt19937_64 rng(4);
        for (int t = 0; t < 100; ++t) {
            const std::size_t d = 1 + rng() % 10;
            const std::size_t n = 1 + rng() % 50;
            const auto X = oracle::random_matrix(rng, n, d);
            const auto y = oracle::random_labels(rng, n);
            const auto theta = oracle::random_vector(rng, d + 1, 0.5);
            const auto analytic = grad_theta(ModelParams(theta), X, y);
            const auto numeric = oracle::central_diff([&](const auto& v) { return oracle::nll(v, X, y); }, theta);
            CHECK(oracle::rel_err(analytic, numeric) < 1e-5);
        }
    }

    SUBCASE("descent under a small step") {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 50; ++t) {
            const auto X = oracle::random_matrix(rng, 30, 4);
            const auto y = oracle::random_labels(rng, 30);
            auto theta = oracle::random_vector(rng, 5);
            const double before = nll_loss(ModelParams(theta), X, y);
            const auto g = grad_theta(ModelParams(theta), X, y);
            for (std::size_t k = 0; k < theta.size(); ++k) {
                theta[k] -= 1e-4 * g[k];
            }
            CHECK(nll_loss(ModelParams(theta), X, y) <= before);
        }
    }
}

TEST_CASE("grad_x") {
    const std::vector<double> x{0.3, -1.2};
    CHECK(grad_x(ModelParams({0.0, 0.0, 1.7}), x, 1.0) == std::vector<double>{0.0, 0.0});
    // saturated head: p rounds to exactly 1 = y
    const auto sat = grad_x(ModelParams({0.0, 0.0, 800.0}), x, 1.0);
    CHECK(sat == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(grad_x(ModelParams({1.0, 0.0}), x, 1.0), InvalidInput);
    CHECK_THROWS_AS(grad_x(ModelParams({1.0, 0.0, 0.0}), x, 0.3), InvalidInput);

    std::mt19937_64 rng(6);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 1 + rng() % 10;
        const auto theta = oracle::random_vector(rng, d + 1);
        const auto xr = oracle::random_vector(rng, d);
        const double y = (rng() % 2) ? 1.0 : 0.0;
        const auto analytic = grad_x(ModelParams(theta), xr, y);
        const auto numeric = oracle::central_diff(
            [&](const std::vector<double>& v) { return oracle::nll(theta, Matrix(1, d, v), {y}); }, xr);
        CHECK(oracle::rel_err(analytic, numeric) < 1e-5);
    }
}

TEST_CASE("bank_predict") {
    const std::vector<double> x{0.4, 0.1};
    const auto mc = bank_predict(HeadBank::zeros(TaskKind::multi_class(4), 2), x);
    for (double p : mc) {
        CHECK(p == 0.25);
    }
    const auto ml = bank_predict(HeadBank::zeros(TaskKind::multi_label(2), 2), x);
    CHECK(ml == std::vector<double>{0.5, 0.5});

    // head logits (2, 0, -2): sigmoids renormalized
    const HeadBank bank(TaskKind::multi_class(3),
                        {ModelParams({0.0, 0.0, 2.0}), ModelParams({0.0, 0.0, 0.0}), ModelParams({0.0, 0.0, -2.0})});
    const auto p = bank_predict(bank, x);
    CHECK(p[0] == doctest::Approx(0.587198051985255).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.33333333333333337).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.07946861468141171).epsilon(1e-12));
    CHECK(bank_predict_class(bank, x) == 0);

    std::mt19937_64 rng(7);
    for (int t = 0; t < 100; ++t) {
        std::vector<ModelParams> heads;
        for (int j = 0; j < 5; ++j) {
            heads.emplace_back(oracle::random_vector(rng, 4, 3.0));
        }
        const auto s = bank_predict(HeadBank(TaskKind::multi_class(5), heads), oracle::random_vector(rng, 3));
        double sum = 0.0;
        for (double v : s) {
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}
