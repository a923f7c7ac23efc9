#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "advda/kernels.hpp"
#include "oracles.hpp"

using namespace advda;

namespace {

struct Case {
    ModelParams params;
    Matrix X;
    std::vector<double> y;
};

Case make_case(std::uint64_t seed, std::size_t n, std::size_t d) {
    std::mt19937_64 rng(seed);
    return {ModelParams(oracle::random_vector(rng, d + 1)), oracle::random_matrix(rng, n, d),
            oracle::random_labels(rng, n)};
}

}  // namespace

TEST_CASE("parallel rowwise kernels equal the serial reference bitwise") {
    for (std::size_t n : {1u, 7u, 255u, 256u, 257u, 3000u}) {
        const auto c = make_case(n, n, 9);
        CHECK(kernels::omp::score_rows(c.params, c.X) == kernels::serial::score_rows(c.params, c.X));
        const AdvConfig a{0.1, 20, 1.0};
        CHECK(kernels::omp::augment_rows(c.params, c.X, c.y, a) == kernels::serial::augment_rows(c.params, c.X, c.y, a));
        CHECK(kernels::serial::augment_rows(c.params, c.X, c.y, a) == augment_batch(c.params, c.X, c.y, a));

        const HeadBank bank(TaskKind::multi_class(3), {c.params, ModelParams::zeros(9), c.params});
        CHECK(kernels::omp::bank_scores(bank, c.X) == kernels::serial::bank_scores(bank, c.X));
        const auto scores = kernels::serial::bank_scores(bank, c.X);
        const auto expect = bank_predict(bank, c.X.row(0));
        CHECK(std::vector<double>(scores.row(0).begin(), scores.row(0).end()) == expect);
    }
}

TEST_CASE("nll_sum") {
    for (std::size_t n : {1u, 300u, 5000u}) {
        const auto c = make_case(100 + n, n, 6);
        const double serial = kernels::serial::nll_sum(c.params, c.X, c.y);
        CHECK(serial == nll_loss(c.params, c.X, c.y));
        const double par = kernels::omp::nll_sum(c.params, c.X, c.y);
        CHECK(par == doctest::Approx(serial).epsilon(1e-12));

        const int saved = kernels::max_threads();
        for (int t : {1, 2, 3, 8}) {
            kernels::set_threads(t);
            CHECK(kernels::omp::nll_sum(c.params, c.X, c.y) == par);
            CHECK(kernels::omp::score_rows(c.params, c.X) == kernels::serial::score_rows(c.params, c.X));
        }
        kernels::set_threads(saved);
    }
}
