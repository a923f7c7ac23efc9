#include "advda/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include "advda/errors.hpp"

namespace advda {

void Dataset::validate() const {
    if (X.rows() == 0) {
        throw InvalidInput("dataset is empty");
    }
    if (Y.rows() != X.rows()) {
        throw InvalidInput("label rows do not match feature rows");
    }
    if (Y.cols() != task.label_columns()) {
        throw InvalidInput("task " + task.to_string() + " expects " + std::to_string(task.label_columns()) +
                           " label column(s), found " + std::to_string(Y.cols()));
    }
    if (feature_names.size() != X.cols()) {
        throw InvalidInput("feature name count does not match feature columns");
    }
    if (group && group->size() != X.rows()) {
        throw InvalidInput("group column length does not match rows");
    }
    for (double v : X.data()) {
        if (!std::isfinite(v)) {
            throw InvalidInput("non-finite feature value");
        }
    }
    const bool multiclass = task.kind() == TaskKind::Kind::MultiClass;
    for (double v : Y.data()) {
        if (multiclass) {
            if (v < 0.0 || v >= static_cast<double>(task.count()) || v != std::floor(v)) {
                throw InvalidInput("class label " + std::to_string(v) + " outside 0.." +
                                   std::to_string(task.count() - 1));
            }
        } else if (v != 0.0 && v != 1.0) {
            throw InvalidInput("labels must be 0 or 1 for task " + task.to_string());
        }
    }
}

std::vector<double> Dataset::head_labels(std::size_t j) const {
    if (j >= task.num_heads()) {
        throw InvalidInput("head index out of range");
    }
    if (task.kind() == TaskKind::Kind::MultiClass) {
        std::vector<double> out(n());
        for (std::size_t i = 0; i < n(); ++i) {
            out[i] = Y(i, 0) == static_cast<double>(j) ? 1.0 : 0.0;
        }
        return out;
    }
    return Y.column(j);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.X = X.select_rows(rows);
    out.Y = Y.select_rows(rows);
    out.task = task;
    out.feature_names = feature_names;
    if (group) {
        std::vector<std::string> g;
        g.reserve(rows.size());
        for (auto r : rows) {
            g.push_back((*group)[r]);
        }
        out.group = std::move(g);
    }
    return out;
}

std::vector<std::string> default_feature_names(std::size_t d) {
    std::vector<std::string> names(d);
    for (std::size_t j = 0; j < d; ++j) {
        names[j] = "x" + std::to_string(j);
    }
    return names;
}

Dataset concat(std::span<const Dataset> parts) {
    if (parts.empty()) {
        throw InvalidInput("concat: no datasets");
    }
    const Dataset& first = parts.front();
    std::size_t rows = 0;
    bool grouped = true;
    for (const auto& p : parts) {
        if (p.d() != first.d() || p.Y.cols() != first.Y.cols() || !(p.task == first.task)) {
            throw InvalidInput("concat: datasets disagree in shape or task");
        }
        rows += p.n();
        grouped = grouped && p.group.has_value();
    }
    Dataset out;
    out.task = first.task;
    out.feature_names = first.feature_names;
    out.X = Matrix(rows, first.d());
    out.Y = Matrix(rows, first.Y.cols());
    std::vector<std::string> g;
    std::size_t at = 0;
    for (const auto& p : parts) {
        std::copy(p.X.data().begin(), p.X.data().end(), out.X.data().begin() + at * first.d());
        std::copy(p.Y.data().begin(), p.Y.data().end(), out.Y.data().begin() + at * first.Y.cols());
        if (grouped) {
            g.insert(g.end(), p.group->begin(), p.group->end());
        }
        at += p.n();
    }
    if (grouped) {
        out.group = std::move(g);
    }
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double train_fraction,
                                                                            std::uint64_t seed) {
    if (n < 2) {
        throw InvalidInput("a train/test split needs at least 2 rows");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidInput("train fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    order.resize(n_train);
    return {std::move(order), std::move(test)};
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double train_fraction, std::uint64_t seed) {
    const auto [train, test] = split_indices(data.n(), train_fraction, seed);
    return {data.subset(train), data.subset(test)};
}

std::vector<Dataset> subgroup_partition(const Dataset& data, std::span<const DomainSpec> specs) {
    const bool needs_group = std::any_of(specs.begin(), specs.end(), [](const auto& s) { return !s.is_all(); });
    if (needs_group && !data.group) {
        throw InvalidInput("subgroup_partition: dataset has no group column");
    }
    std::vector<Dataset> out;
    out.reserve(specs.size());
    for (const auto& spec : specs) {
        if (spec.is_all()) {
            out.push_back(data);
            continue;
        }
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < data.n(); ++i) {
            if ((*data.group)[i] == spec.selector) {
                rows.push_back(i);
            }
        }
        if (rows.empty()) {
            throw InvalidInput("group value '" + spec.selector + "' not present in data");
        }
        out.push_back(data.subset(rows));
    }
    return out;
}

Standardizer Standardizer::fit(const Matrix& train) {
    if (train.rows() == 0) {
        throw InvalidInput("standardize: empty training set");
    }
    const std::size_t d = train.cols();
    const auto n = static_cast<double>(train.rows());
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < train.rows(); ++i) {
            sum += train(i, j);
        }
        const double mu = sum / n;
        double ss = 0.0;
        for (std::size_t i = 0; i < train.rows(); ++i) {
            ss += (train(i, j) - mu) * (train(i, j) - mu);
        }
        const double sd = std::sqrt(ss / n);
        if (sd == 0.0) {
            // pass through untouched
            s.mean[j] = 0.0;
            s.constant_columns.push_back(j);
        } else {
            s.mean[j] = mu;
            s.scale[j] = sd;
        }
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& X) const {
    if (X.cols() != mean.size()) {
        throw InvalidInput("standardize: column count mismatch");
    }
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            out(i, j) = (X(i, j) - mean[j]) / scale[j];
        }
    }
    return out;
}

Matrix Standardizer::invert(const Matrix& Z) const {
    if (Z.cols() != mean.size()) {
        throw InvalidInput("standardize: column count mismatch");
    }
    Matrix out(Z.rows(), Z.cols());
    for (std::size_t i = 0; i < Z.rows(); ++i) {
        for (std::size_t j = 0; j < Z.cols(); ++j) {
            out(i, j) = Z(i, j) * scale[j] + mean[j];
        }
    }
    return out;
}

Dataset Standardizer::apply(const Dataset& data) const {
    Dataset out = data;
    out.X = apply(data.X);
    return out;
}

StandardizeResult standardize(const Dataset& train, std::span<const Dataset> others) {
    StandardizeResult result{Standardizer::fit(train.X), {}};
    for (auto j : result.transform.constant_columns) {
        std::cerr << "warning: feature '" << train.feature_names.at(j) << "' is constant; left unscaled\n";
    }
    result.datasets.push_back(result.transform.apply(train));
    for (const auto& other : others) {
        result.datasets.push_back(result.transform.apply(other));
    }
    return result;
}

int los_bucketize(double los_hours) {
    if (!(los_hours >= 0.0)) {
        throw InvalidInput("length of stay must be nonnegative");
    }
    if (los_hours < 24.0) {
        return 0;
    }
    if (los_hours < 192.0) {
        return static_cast<int>(std::floor(los_hours / 24.0));
    }
    if (los_hours < 336.0) {
        return 8;
    }
    return 9;
}

}  // namespace advda
