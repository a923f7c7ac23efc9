#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "advda/errors.hpp"
#include "advda/harness.hpp"

using namespace advda;
using nlohmann::json;

namespace {

json small_synth(double shift = 0.5) {
    return {{"synth", {{"d", 5}, {"n_source", 400}, {"n_target", 200}, {"shift", shift}}}};
}

ExperimentConfig small_config(double shift = 0.5) {
    return ExperimentConfig::from_json({{"data", small_synth(shift)},
                                        {"train", {{"epochs", 5}}},
                                        {"adversarial", {{"steps", 5}}},
                                        {"alpha_grid", {0.5, 1.0}},
                                        {"lambda_grid", {0.0, 0.1}},
                                        {"seeds", {0, 1}}});
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = small_config();
    CHECK(cfg.train.epochs == 5);
    CHECK(cfg.train.learning_rate == 0.01);
    CHECK(cfg.adversarial.epsilon == 0.1);
    CHECK(cfg.regimes.size() == 5);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1});
    CHECK(ExperimentConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());

    CHECK_THROWS_AS(ExperimentConfig::from_json({{"data", small_synth()}, {"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"train", {{"epochs", 5}}}}), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"data", small_synth()}, {"train", {{"epochs", "five"}}}}),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"data", small_synth()}, {"alpha_grid", {0.0}}}), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"data", small_synth()}, {"lambda_grid", json::array()}}),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"data", small_synth()}, {"regimes", {"DA_ZZ"}}}), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"data", {{"csv", {{"path", "/no/such/file.csv"}}}}}}),
                    ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json({{"data", small_synth()}, {"task", {{"kind", "multiclass"}, {"count", 3}}}}),
        ConfigError);
    CHECK_THROWS_AS(load_config("/no/such/config.json"), ConfigError);
}

TEST_CASE("test set guard") {
    Dataset d;
    TestSetGuard g(d);
    g.begin_selection();
    CHECK_THROWS_AS(g.read(), std::logic_error);
    CHECK(g.reads_during_selection() == 1);
    g.end_selection();
    CHECK_NOTHROW(g.read());
    CHECK(g.reads() == 1);
}

TEST_CASE("five-way report") {
    const auto cfg = small_config();
    const auto r = run_five_way(cfg);
    CHECK(r.kind == "five-way");
    CHECK(r.test_accesses_during_selection == 0);
    CHECK(r.test_evaluations == 10);

    std::size_t tests = 0;
    std::map<std::pair<std::string, std::uint64_t>, std::size_t> validation;
    for (const auto& e : r.entries) {
        CHECK(std::isfinite(e.metrics.headline));
        if (e.split == "test") {
            ++tests;
        } else {
            ++validation[{e.regime, e.seed}];
        }
    }
    CHECK(tests == 10);
    for (std::uint64_t seed : {0u, 1u}) {
        // every grid point once per seed
        CHECK(validation[{"DA_NT_NT", seed}] == 2);
        CHECK(validation[{"DA_AT_NT", seed}] == 2);
        CHECK(validation[{"DA_AT_AT", seed}] == 4);
        for (auto tag : kAllRegimes) {
            CHECK(r.find(to_string(tag), seed) != nullptr);
        }
        CHECK(r.find("DA_AT_AT", seed)->alpha.has_value());
        CHECK(r.find("DA_AT_AT", seed)->lambda.has_value());
    }
    CHECK(std::is_sorted(r.entries.begin(), r.entries.end(), [](const ReportEntry& a, const ReportEntry& b) {
        return std::tie(a.regime, a.seed) < std::tie(b.regime, b.seed);
    }));

    const auto doc = r.document();
    CHECK(doc.contains("wall_time_seconds"));
    CHECK(doc["body"]["software"]["version"] == kSoftwareVersion);
    CHECK(doc["body"]["per_seed"].size() == 2);
    CHECK(doc["body"]["per_seed"][0]["source_alpha_sweep"].size() == 2);

    CHECK(run_five_way(cfg).body_text() == r.body_text());
}

TEST_CASE("five-way without shift and with the no-transfer point") {
    auto cfg = ExperimentConfig::from_json({{"data", {{"synth", {{"d", 5}, {"n_source", 3000}, {"n_target", 3000}, {"shift", 0.0}}}}},
                                            {"train", {{"epochs", 10}}},
                                            {"adversarial", {{"steps", 5}}},
                                            {"alpha_grid", {1.0}},
                                            {"lambda_grid", {0.0, 0.01, 1.0}},
                                            {"seeds", {0, 1, 2}}});
    const auto r = run_five_way(cfg);
    for (std::uint64_t seed : {0u, 1u, 2u}) {
        double lo = 1.0;
        double hi = 0.0;
        for (auto tag : kAllRegimes) {
            const double s = r.find(to_string(tag), seed)->metrics.headline;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        CHECK(hi - lo <= 0.02);
    }
}

TEST_CASE("shift matrix") {
    auto cfg = small_config();
    auto r = run_shift_matrix(cfg);
    const auto& cells = r.per_seed[0]["cells"];
    CHECK(cells.size() == 3);
    CHECK(cells[0].size() == 2);
    CHECK(r.per_seed[0]["sources"] == json({"source", "target", "all"}));
    CHECK(r.entries.size() == 2 * 6);

    SUBCASE("same data registered twice") {
        auto twin = cfg;
        twin.domains = {{"a", "source"}, {"b", "source"}};
        const auto t = run_shift_matrix(twin);
        for (const auto& seed : t.per_seed) {
            const double ref = seed["cells"][0][0];
            for (const auto& row : seed["cells"]) {
                for (double v : row) {
                    CHECK(std::abs(v - ref) <= 1e-9);
                }
            }
        }
    }
    SUBCASE("one domain is not a matrix") {
        auto one = cfg;
        one.domains = {{"a", "source"}};
        CHECK_THROWS_AS(run_shift_matrix(one), ConfigError);
    }
}

TEST_CASE("sparsity comparison report") {
    auto cfg = small_config();
    const auto r = run_sparsity_comparison(cfg);
    for (const auto& s : r.per_seed) {
        CHECK(s["weights"].size() == 3);
        for (const auto& [name, w] : s["weights"].items()) {
            CHECK(w.size() == 6);
        }
        CHECK(std::abs(s["cosine"]["AT_L1"].get<double>()) <= 1.0 + 1e-12);
    }
    auto mc = cfg;
    mc.task = TaskKind::multi_label(2);
    CHECK_THROWS_AS(run_sparsity_comparison(mc), ConfigError);
}

TEST_CASE("CSV-backed runs") {
    const auto dir = std::filesystem::temp_directory_path() / "advda_test_harness";
    std::filesystem::create_directories(dir);
    const auto path = dir / "domains.csv";
    {
        SynthConfig sc;
        sc.d = 4;
        sc.n_source = 300;
        sc.n_target = 200;
        const auto dom = synth_shifted_domains(sc);
        const std::vector<Dataset> parts{dom.source, dom.target};
        save_csv(concat(parts), path);
    }
    auto cfg = ExperimentConfig::from_json({{"data", {{"csv", {{"path", path.string()}}}}},
                                            {"train", {{"epochs", 3}}},
                                            {"adversarial", {{"steps", 3}}},
                                            {"alpha_grid", {1.0}},
                                            {"lambda_grid", {0.0, 1.0}},
                                            {"standardize", true}});
    const auto r = run_five_way(cfg);
    CHECK(r.find("DA_AT_AT", 0) != nullptr);

    cfg.target = "nowhere";
    CHECK_THROWS(run_five_way(cfg));
}
