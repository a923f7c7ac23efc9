#include "advda/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "advda/errors.hpp"

namespace advda {

TaskKind TaskKind::multi_class(std::size_t classes) {
    if (classes < 2) {
        throw InvalidInput("MultiClass task needs at least 2 classes");
    }
    return TaskKind(Kind::MultiClass, classes);
}

TaskKind TaskKind::multi_label(std::size_t outcomes) {
    if (outcomes < 1) {
        throw InvalidInput("MultiLabel task needs at least 1 outcome");
    }
    return TaskKind(Kind::MultiLabel, outcomes);
}

TaskKind TaskKind::parse(const std::string& text) {
    if (text == "binary") {
        return binary();
    }
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string head = text.substr(0, colon);
        std::size_t count = 0;
        try {
            count = std::stoul(text.substr(colon + 1));
        } catch (const std::exception&) {
            throw InvalidInput("bad task count in '" + text + "'");
        }
        if (head == "multiclass") {
            return multi_class(count);
        }
        if (head == "multilabel") {
            return multi_label(count);
        }
    }
    throw InvalidInput("unknown task '" + text + "' (expected binary, multiclass:C or multilabel:k)");
}

std::string TaskKind::to_string() const {
    switch (kind_) {
    case Kind::Binary:
        return "binary";
    case Kind::MultiClass:
        return "multiclass:" + std::to_string(count_);
    case Kind::MultiLabel:
        return "multilabel:" + std::to_string(count_);
    }
    return "binary";
}

ModelParams::ModelParams(std::vector<double> theta) : theta_(std::move(theta)) {
    if (theta_.empty()) {
        throw InvalidInput("ModelParams needs at least the bias entry");
    }
    for (double v : theta_) {
        if (!std::isfinite(v)) {
            throw InvalidInput("ModelParams entries must be finite");
        }
    }
}

HeadBank::HeadBank(TaskKind task, std::vector<ModelParams> heads)
    : task_(task), heads_(std::move(heads)) {
    if (heads_.size() != task_.num_heads()) {
        throw InvalidInput("HeadBank: head count " + std::to_string(heads_.size()) +
                           " does not match task " + task_.to_string());
    }
    for (const auto& h : heads_) {
        if (h.size() != heads_.front().size()) {
            throw InvalidInput("HeadBank: heads differ in dimension");
        }
    }
}

HeadBank HeadBank::zeros(TaskKind task, std::size_t feature_dim) {
    return HeadBank(task, std::vector<ModelParams>(task.num_heads(), ModelParams::zeros(feature_dim)));
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

namespace {

void check_dim(const ModelParams& params, std::size_t d) {
    if (params.feature_dim() != d) {
        throw InvalidInput("feature dimension " + std::to_string(d) + " does not match parameters (" +
                           std::to_string(params.feature_dim()) + ")");
    }
}

void check_rows(const Matrix& X, std::span<const double> y) {
    if (X.rows() == 0) {
        throw InvalidInput("empty sample set");
    }
    if (X.rows() != y.size()) {
        throw InvalidInput("row count does not match label count");
    }
}

}  // namespace

void check_binary_labels(std::span<const double> y) {
    for (double v : y) {
        if (v != 0.0 && v != 1.0) {
            throw InvalidInput("labels must be 0 or 1");
        }
    }
}

double logit(const ModelParams& params, std::span<const double> x) {
    check_dim(params, x.size());
    const auto theta = params.theta();
    double z = theta[x.size()];
    for (std::size_t j = 0; j < x.size(); ++j) {
        z += theta[j] * x[j];
    }
    return z;
}

double predict_proba(const ModelParams& params, std::span<const double> x) {
    return sigmoid(logit(params, x));
}

double nll_loss(const ModelParams& params, const Matrix& X, std::span<const double> y) {
    check_rows(X, y);
    check_dim(params, X.cols());
    check_binary_labels(y);
    double total = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double p = std::clamp(predict_proba(params, X.row(i)), kProbClamp, 1.0 - kProbClamp);
        total -= y[i] == 1.0 ? std::log(p) : std::log(1.0 - p);
    }
    return total;
}

void accumulate_grad_theta(const ModelParams& params, const Matrix& X, std::span<const double> y,
                           double scale, std::span<double> out) {
    check_rows(X, y);
    check_dim(params, X.cols());
    check_binary_labels(y);
    if (out.size() != params.size()) {
        throw InvalidInput("gradient buffer has wrong length");
    }
    const std::size_t d = X.cols();
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto x = X.row(i);
        const double r = scale * (predict_proba(params, x) - y[i]);
        for (std::size_t j = 0; j < d; ++j) {
            out[j] += r * x[j];
        }
        out[d] += r;
    }
}

std::vector<double> grad_theta(const ModelParams& params, const Matrix& X, std::span<const double> y) {
    std::vector<double> g(params.size(), 0.0);
    accumulate_grad_theta(params, X, y, 1.0, g);
    return g;
}

std::vector<double> grad_x(const ModelParams& params, std::span<const double> x, double y) {
    if (y != 0.0 && y != 1.0) {
        throw InvalidInput("label must be 0 or 1");
    }
    const double r = predict_proba(params, x) - y;
    const auto w = params.weights();
    std::vector<double> g(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        g[j] = r * w[j];
    }
    return g;
}

std::vector<double> bank_predict(const HeadBank& bank, std::span<const double> x) {
    std::vector<double> out(bank.num_heads());
    for (std::size_t j = 0; j < bank.num_heads(); ++j) {
        out[j] = predict_proba(bank.head(j), x);
    }
    if (bank.task().kind() == TaskKind::Kind::MultiClass) {
        double sum = 0.0;
        for (double p : out) {
            sum += p;
        }
        if (sum == 0.0) {
            // every head saturated to zero
            std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
            return out;
        }
        for (double& p : out) {
            p /= sum;
        }
    }
    return out;
}

std::size_t bank_predict_class(const HeadBank& bank, std::span<const double> x) {
    const auto scores = bank_predict(bank, x);
    return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

}  // namespace advda
