#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "advda/adversarial.hpp"
#include "advda/csv_io.hpp"
#include "advda/dataset.hpp"
#include "advda/domain_adaptation.hpp"
#include "advda/metrics.hpp"
#include "advda/synth.hpp"
#include "advda/training.hpp"

namespace advda {

inline constexpr const char* kSoftwareVersion = "1.0.0";

/// Where a run gets its rows: either one CSV with a group column, or the
/// synthetic generator (reseeded from each run seed).
struct DataSource {
    std::optional<SynthConfig> synth;
    std::optional<std::string> csv_path;
    CsvSchema schema;
};

struct ExperimentConfig {
    TaskKind task = TaskKind::binary();
    DataSource data;
    std::vector<DomainSpec> domains;  // shift matrix; defaults to {source, target}
    std::string source = "source";
    std::string target = "target";
    std::vector<RegimeTag> regimes{std::begin(kAllRegimes), std::end(kAllRegimes)};
    TrainConfig train;
    AdvConfig adversarial;
    std::vector<double> alpha_grid = default_alpha_grid();
    std::vector<double> lambda_grid = default_lambda_grid();
    std::vector<std::uint64_t> seeds{0};
    // Cap on target training rows after the split (small-target experiments).
    std::optional<std::size_t> target_train_limit;
    bool standardize = false;
    double sparsity_l1_weight = 1.0;

    /// Strict parse: unknown keys, wrong types and invalid values raise ConfigError.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

ExperimentConfig load_config(const std::string& path);

/// One scored model: a final test evaluation or one validation grid point.
struct ReportEntry {
    std::string regime;
    std::uint64_t seed = 0;
    std::string source;
    std::string target;
    std::string split;  // "test" or "validation"
    std::optional<double> alpha;
    std::optional<double> lambda;
    MetricsReport metrics;
};

struct RunReport {
    std::string kind;
    ExperimentConfig config;
    std::vector<ReportEntry> entries;  // sorted by (regime, seed, source, target, split, alpha, lambda)
    nlohmann::json per_seed = nlohmann::json::array();
    std::size_t test_accesses_during_selection = 0;
    std::size_t test_evaluations = 0;
    double wall_time_s = 0.0;

    // Canonical serialization of everything except wall time.
    nlohmann::json body() const;
    std::string body_text() const { return body().dump(2); }
    // {"body": ..., "wall_time_seconds": ...}
    nlohmann::json document() const;

    const ReportEntry* find(const std::string& regime, std::uint64_t seed, const std::string& split = "test") const;
};

/// Held-out test rows. Reads are refused while hyperparameter selection is
/// running and every read is counted.
class TestSetGuard {
public:
    explicit TestSetGuard(Dataset data) : data_(std::move(data)) {}

    void begin_selection() { selecting_ = true; }
    void end_selection() { selecting_ = false; }
    // Throws std::logic_error during selection.
    const Dataset& read();

    std::size_t reads() const { return reads_; }
    std::size_t reads_during_selection() const { return refused_; }

private:
    Dataset data_;
    std::atomic<bool> selecting_{false};
    std::atomic<std::size_t> reads_{0};
    std::atomic<std::size_t> refused_{0};
};

/// Trains a normal model on every domain's training split plus the pooled
/// "all" split and scores each on every domain's test split.
RunReport run_shift_matrix(const ExperimentConfig& cfg);

/// The five regimes on one source/target pair. alpha and lambda are chosen
/// on a validation slice of the relevant training split; the chosen setting
/// is refit on the full training split and scored once on the test split.
RunReport run_five_way(const ExperimentConfig& cfg);

/// Adversarial, L1-regularized and normal models on the source domain, with
/// pairwise cosine similarities and a coordinate-shuffled control.
RunReport run_sparsity_comparison(const ExperimentConfig& cfg);

// Rows of the configured data source for one run seed, with a group column.
Dataset materialize_data(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace advda
