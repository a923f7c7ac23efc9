#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advda/core_model.hpp"
#include "advda/matrix.hpp"

namespace advda {

/// Features X (n x d), labels Y and the task they encode. Binary and
/// MultiLabel tasks store one 0/1 column per head; MultiClass stores the
/// class index in a single column.
struct Dataset {
    Matrix X;
    Matrix Y;
    TaskKind task = TaskKind::binary();
    std::vector<std::string> feature_names;
    std::optional<std::vector<std::string>> group;

    std::size_t n() const { return X.rows(); }
    std::size_t d() const { return X.cols(); }

    // Throws InvalidInput on empty data, shape mismatches, non-finite
    // features or labels outside the task range.
    void validate() const;

    // 0/1 targets of head j (one-vs-rest for MultiClass).
    std::vector<double> head_labels(std::size_t j) const;

    Dataset subset(std::span<const std::size_t> rows) const;
};

// Default feature names x0..x{d-1}.
std::vector<std::string> default_feature_names(std::size_t d);

// Rows concatenated; feature names and task must agree.
Dataset concat(std::span<const Dataset> parts);

/// Seeded uniform shuffle of 0..n-1; the first floor(fraction * n) indices
/// are the training part.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double train_fraction,
                                                                            std::uint64_t seed);

/// split_indices applied to the rows of `data`.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double train_fraction,
                                             std::uint64_t seed);

/// A named domain: rows whose group value equals `selector`, or every row
/// when the selector is "all".
struct DomainSpec {
    std::string name;
    std::string selector;

    static DomainSpec all() { return {"all", "all"}; }
    bool is_all() const { return selector == "all"; }
};

std::vector<Dataset> subgroup_partition(const Dataset& data, std::span<const DomainSpec> specs);

/// Per-feature affine transform fitted on a training set. Columns with zero
/// spread are passed through and listed in `constant_columns`.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<std::size_t> constant_columns;

    static Standardizer fit(const Matrix& train);
    Matrix apply(const Matrix& X) const;
    Matrix invert(const Matrix& Z) const;
    Dataset apply(const Dataset& data) const;
};

struct StandardizeResult {
    Standardizer transform;
    std::vector<Dataset> datasets;  // train first, then the others in order
};

StandardizeResult standardize(const Dataset& train, std::span<const Dataset> others = {});

/// Ten ordinal length-of-stay classes from remaining ICU hours:
/// <24h -> 0, day d of the first week -> d (1..7), second week -> 8,
/// two weeks or more -> 9. Buckets are left-inclusive.
int los_bucketize(double los_hours);

inline constexpr int kLosClasses = 10;

}  // namespace advda
