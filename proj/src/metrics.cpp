#include "advda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "advda/errors.hpp"
#include "advda/kernels.hpp"

namespace advda {

double auroc(std::span<const double> scores, std::span<const double> labels) {
    if (scores.size() != labels.size()) {
        throw InvalidInput("auroc: scores and labels differ in length");
    }
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of (doubled) midranks of the positives; doubling keeps ranks integral.
    double rank2_pos = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            ++j;
        }
        const double rank2 = static_cast<double>(i + 1 + j);  // 2 * mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            const double y = labels[order[k]];
            if (y != 0.0 && y != 1.0) {
                throw InvalidInput("auroc: labels must be 0 or 1");
            }
            if (y == 1.0) {
                rank2_pos += rank2;
                ++pos;
            }
        }
        i = j;
    }
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) {
        throw UndefinedMetric("auroc undefined: labels contain a single class");
    }
    const double p = static_cast<double>(pos);
    const double u = rank2_pos / 2.0 - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(neg));
}

MacroAuroc macro_auroc(const Matrix& scores, const Matrix& labels) {
    if (scores.rows() != labels.rows() || scores.cols() != labels.cols()) {
        throw InvalidInput("macro_auroc: score and label shapes differ");
    }
    MacroAuroc out;
    out.per_column.assign(scores.cols(), std::numeric_limits<double>::quiet_NaN());
    double sum = 0.0;
    std::size_t valid = 0;
    for (std::size_t c = 0; c < scores.cols(); ++c) {
        const auto s = scores.column(c);
        const auto y = labels.column(c);
        try {
            out.per_column[c] = auroc(s, y);
            sum += out.per_column[c];
            ++valid;
        } catch (const UndefinedMetric&) {
            out.skipped.push_back(c);
        }
    }
    if (valid == 0) {
        throw UndefinedMetric("macro_auroc undefined: no outcome column has both classes");
    }
    out.value = sum / static_cast<double>(valid);
    return out;
}

double linear_weighted_kappa(std::span<const int> pred, std::span<const int> truth, int num_classes) {
    if (pred.size() != truth.size() || pred.empty()) {
        throw InvalidInput("kappa: inputs must be nonempty and of equal length");
    }
    if (num_classes < 2) {
        throw InvalidInput("kappa: need at least 2 classes");
    }
    const auto C = static_cast<std::size_t>(num_classes);
    std::vector<double> pred_marg(C, 0.0);
    std::vector<double> true_marg(C, 0.0);
    double observed = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0 || pred[i] >= num_classes || truth[i] < 0 || truth[i] >= num_classes) {
            throw InvalidInput("kappa: class label out of range");
        }
        observed += std::abs(pred[i] - truth[i]);
        pred_marg[pred[i]] += 1.0;
        true_marg[truth[i]] += 1.0;
    }
    const double n = static_cast<double>(pred.size());
    double expected = 0.0;
    for (std::size_t a = 0; a < C; ++a) {
        for (std::size_t b = 0; b < C; ++b) {
            const double w = a > b ? static_cast<double>(a - b) : static_cast<double>(b - a);
            expected += w * pred_marg[a] * true_marg[b];
        }
    }
    expected /= n;
    // The common 1/(C-1) weight factor cancels in the ratio.
    if (expected == 0.0) {
        throw UndefinedMetric("kappa undefined: expected weighted disagreement is zero");
    }
    return 1.0 - observed / expected;
}

std::string headline_metric_name(const TaskKind& task) {
    switch (task.kind()) {
    case TaskKind::Kind::Binary:
        return "auroc";
    case TaskKind::Kind::MultiClass:
        return "linear_weighted_kappa";
    case TaskKind::Kind::MultiLabel:
        return "macro_auroc";
    }
    return "auroc";
}

MetricsReport evaluate_scores(const Matrix& scores, const Dataset& data) {
    if (scores.rows() != data.n() || scores.cols() != data.task.num_heads()) {
        throw InvalidInput("evaluate: score matrix shape does not match dataset");
    }
    MetricsReport r;
    r.task = data.task;
    r.metric_name = headline_metric_name(data.task);
    r.n_eval = data.n();
    switch (data.task.kind()) {
    case TaskKind::Kind::Binary:
        r.headline = auroc(scores.column(0), data.Y.column(0));
        break;
    case TaskKind::Kind::MultiClass: {
        std::vector<int> pred(data.n());
        std::vector<int> truth(data.n());
        for (std::size_t i = 0; i < data.n(); ++i) {
            auto row = scores.row(i);
            pred[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
            truth[i] = static_cast<int>(data.Y(i, 0));
        }
        r.headline = linear_weighted_kappa(pred, truth, static_cast<int>(data.task.count()));
        break;
    }
    case TaskKind::Kind::MultiLabel: {
        auto m = macro_auroc(scores, data.Y);
        r.headline = m.value;
        r.per_outcome = std::move(m.per_column);
        r.skipped_outcomes = std::move(m.skipped);
        break;
    }
    }
    return r;
}

MetricsReport evaluate(const HeadBank& bank, const Dataset& data) {
    if (!(bank.task() == data.task)) {
        throw InvalidInput("evaluate: model task " + bank.task().to_string() + " does not match data task " +
                           data.task.to_string());
    }
    return evaluate_scores(kernels::omp::bank_scores(bank, data.X), data);
}

}  // namespace advda
