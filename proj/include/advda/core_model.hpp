#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "advda/matrix.hpp"

namespace advda {

/// Prediction task encoding. Multi-class problems are decomposed one-vs-rest
/// into `count` binary heads; multi-label problems carry one head per outcome.
class TaskKind {
public:
    enum class Kind { Binary, MultiClass, MultiLabel };

    static TaskKind binary() { return TaskKind(Kind::Binary, 1); }
    static TaskKind multi_class(std::size_t classes);
    static TaskKind multi_label(std::size_t outcomes);

    // Accepts "binary", "multiclass:<C>", "multilabel:<k>".
    static TaskKind parse(const std::string& text);
    std::string to_string() const;

    Kind kind() const { return kind_; }
    // Number of classes (MultiClass) or outcomes (MultiLabel); 1 for Binary.
    std::size_t count() const { return count_; }
    std::size_t num_heads() const { return count_; }
    // Label columns a Dataset of this task carries: class index for
    // MultiClass, one 0/1 column per head otherwise.
    std::size_t label_columns() const { return kind_ == Kind::MultiClass ? 1 : count_; }

    bool operator==(const TaskKind&) const = default;

private:
    TaskKind(Kind kind, std::size_t count) : kind_(kind), count_(count) {}
    Kind kind_;
    std::size_t count_;
};

/// Weights of one binary logistic head. The last entry is the bias, acting
/// on an implicit constant-1 feature.
class ModelParams {
public:
    ModelParams() = default;
    explicit ModelParams(std::vector<double> theta);
    static ModelParams zeros(std::size_t feature_dim) {
        return ModelParams(std::vector<double>(feature_dim + 1, 0.0));
    }

    std::size_t feature_dim() const { return theta_.size() - 1; }
    std::size_t size() const { return theta_.size(); }

    std::span<const double> theta() const { return theta_; }
    std::span<double> theta() { return theta_; }
    std::span<const double> weights() const { return {theta_.data(), feature_dim()}; }
    double bias() const { return theta_.back(); }

    const std::vector<double>& vec() const { return theta_; }

    bool operator==(const ModelParams&) const = default;

private:
    std::vector<double> theta_;
};

/// Ordered heads for one task; all heads share a feature dimension.
class HeadBank {
public:
    HeadBank() : task_(TaskKind::binary()) {}
    HeadBank(TaskKind task, std::vector<ModelParams> heads);
    static HeadBank zeros(TaskKind task, std::size_t feature_dim);

    const TaskKind& task() const { return task_; }
    std::size_t num_heads() const { return heads_.size(); }
    std::size_t feature_dim() const { return heads_.front().feature_dim(); }

    const ModelParams& head(std::size_t j) const { return heads_[j]; }
    ModelParams& head(std::size_t j) { return heads_[j]; }
    const std::vector<ModelParams>& heads() const { return heads_; }

    bool operator==(const HeadBank&) const = default;

private:
    TaskKind task_;
    std::vector<ModelParams> heads_;
};

// Branch-on-sign logistic; never evaluates exp of a positive argument.
double sigmoid(double z);

// log(1 + exp(z)) without overflow.
double softplus(double z);

double logit(const ModelParams& params, std::span<const double> x);
double predict_proba(const ModelParams& params, std::span<const double> x);

/// Summed negative log-likelihood over the rows of X. Probabilities are
/// clamped to [kProbClamp, 1 - kProbClamp] before the log.
double nll_loss(const ModelParams& params, const Matrix& X, std::span<const double> y);

inline constexpr double kProbClamp = 1e-12;

/// Gradient of nll_loss with respect to theta (bias last): sum_i (p_i - y_i) [x_i; 1].
std::vector<double> grad_theta(const ModelParams& params, const Matrix& X, std::span<const double> y);

// Adds scale * grad_theta(params, X, y) into `out`.
void accumulate_grad_theta(const ModelParams& params, const Matrix& X, std::span<const double> y,
                           double scale, std::span<double> out);

/// Gradient of the single-sample loss with respect to the features, (p - y) w.
/// The bias coordinate is not an input and is excluded.
std::vector<double> grad_x(const ModelParams& params, std::span<const double> x, double y);

/// Binary: [p]. MultiLabel: independent head probabilities. MultiClass:
/// one-vs-rest probabilities renormalized to sum to one.
std::vector<double> bank_predict(const HeadBank& bank, std::span<const double> x);

// Argmax of bank_predict (first index on ties).
std::size_t bank_predict_class(const HeadBank& bank, std::span<const double> x);

// Throws InvalidInput unless y is 0 or 1.
void check_binary_labels(std::span<const double> y);

}  // namespace advda
