#include "advda/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "advda/errors.hpp"

namespace advda::kernels {

namespace {

void check(const ModelParams& params, const Matrix& X) {
    if (params.feature_dim() != X.cols()) {
        throw InvalidInput("kernel: feature dimension mismatch");
    }
}

void check(const ModelParams& params, const Matrix& X, std::span<const double> y) {
    check(params, X);
    if (X.rows() != y.size()) {
        throw InvalidInput("kernel: row count does not match label count");
    }
    check_binary_labels(y);
}

double row_nll(const ModelParams& params, std::span<const double> x, double y) {
    const double p = std::clamp(predict_proba(params, x), kProbClamp, 1.0 - kProbClamp);
    return y == 1.0 ? -std::log(p) : -std::log(1.0 - p);
}

void normalize_multiclass(const HeadBank& bank, Matrix& scores, std::size_t i) {
    if (bank.task().kind() != TaskKind::Kind::MultiClass) {
        return;
    }
    auto row = scores.row(i);
    double sum = 0.0;
    for (double p : row) {
        sum += p;
    }
    for (double& p : row) {
        p = sum == 0.0 ? 1.0 / static_cast<double>(row.size()) : p / sum;
    }
}

}  // namespace

namespace serial {

std::vector<double> score_rows(const ModelParams& params, const Matrix& X) {
    check(params, X);
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out[i] = predict_proba(params, X.row(i));
    }
    return out;
}

Matrix bank_scores(const HeadBank& bank, const Matrix& X) {
    Matrix out(X.rows(), bank.num_heads());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < bank.num_heads(); ++j) {
            out(i, j) = predict_proba(bank.head(j), X.row(i));
        }
        normalize_multiclass(bank, out, i);
    }
    return out;
}

double nll_sum(const ModelParams& params, const Matrix& X, std::span<const double> y) {
    check(params, X, y);
    double total = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        total += row_nll(params, X.row(i), y[i]);
    }
    return total;
}

Matrix augment_rows(const ModelParams& params, const Matrix& X, std::span<const double> y, const AdvConfig& cfg) {
    return augment_batch(params, X, y, cfg);
}

}  // namespace serial

namespace omp {

std::vector<double> score_rows(const ModelParams& params, const Matrix& X) {
    check(params, X);
    std::vector<double> out(X.rows());
    const auto n = static_cast<std::ptrdiff_t>(X.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = predict_proba(params, X.row(i));
    }
    return out;
}

Matrix bank_scores(const HeadBank& bank, const Matrix& X) {
    check(bank.head(0), X);
    Matrix out(X.rows(), bank.num_heads());
    const auto n = static_cast<std::ptrdiff_t>(X.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < bank.num_heads(); ++j) {
            out(i, j) = predict_proba(bank.head(j), X.row(i));
        }
        normalize_multiclass(bank, out, i);
    }
    return out;
}

double nll_sum(const ModelParams& params, const Matrix& X, std::span<const double> y) {
    check(params, X, y);
    const std::size_t blocks = (X.rows() + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(blocks, 0.0);
    const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t end = std::min(begin + kReduceBlock, X.rows());
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            s += row_nll(params, X.row(i), y[i]);
        }
        partial[b] = s;
    }
    double total = 0.0;
    for (double s : partial) {
        total += s;
    }
    return total;
}

Matrix augment_rows(const ModelParams& params, const Matrix& X, std::span<const double> y, const AdvConfig& cfg) {
    cfg.validate();
    if (X.rows() == 0) {
        throw InvalidInput("augment_rows: empty batch");
    }
    check(params, X, y);
    Matrix out(X.rows(), X.cols());
    const auto n = static_cast<std::ptrdiff_t>(X.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto adv = iter_fgsm(params, X.row(i), y[i], cfg);
        std::copy(adv.begin(), adv.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace omp

int max_threads() {
    return omp_get_max_threads();
}

void set_threads(int n) {
    if (n > 0) {
        omp_set_num_threads(n);
    }
}

}  // namespace advda::kernels
