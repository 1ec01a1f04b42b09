#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ctxengage/dataset_id.hpp"
#include "ctxengage/stats.hpp"

namespace ctxengage {

// Stage-oriented, resumable orchestration over the artifact tree:
//   <root>/tables/      stage tables (<name>.schema.tsv + <name>.data.tsv)
//   <root>/models/      fitted classifiers and tuning results
//   <root>/evaluations/ evaluations.tsv
//   <root>/stats/       Friedman and posthoc result tables
//   <root>/manifests/   per-(stage, dataset) completion markers

struct PipelineConfig {
    std::filesystem::path root;
    std::uint64_t seed = 1;

    bool create_even_if_already_exist = false;
    bool dev = false;  // restrict processing to the 1% subsets
    bool rewrite_existing_models = false;
    bool recreate_missing_models = true;

    std::vector<std::string> import_datasets = {"train", "val", "test", "val+test"};
    std::vector<std::string> sampling_techniques = {"random", "EU", "EWU", "inter_EWU+EU", "tweet"};
    std::vector<int> sampling_percentages = {1, 2};
    std::vector<std::string> classifier_names = {"bayes", "tree", "forest", "GradientBoosting"};
    std::vector<std::string> top_ns = {"all", "top_5", "top_10", "top_25", "top_50"};
    std::vector<std::string> features_notes = {"scaled", "oracle_scaled"};
    // Subset sizes every model is evaluated on in pred01.
    std::vector<int> evaluation_percentages = {1, 2};

    double alpha = 0.05;

    void validate() const;
    // The (source, technique, percent) triples this run processes.
    std::vector<DatasetId> datasets() const;

    std::filesystem::path tables_dir() const { return root / "tables"; }
    std::filesystem::path models_dir() const { return root / "models"; }
    std::filesystem::path evaluations_path() const { return root / "evaluations" / "evaluations.tsv"; }
    std::filesystem::path stats_dir() const { return root / "stats"; }
    std::filesystem::path manifests_dir() const { return root / "manifests"; }
};

PipelineConfig pipeline_config_from_file(const std::string& path);

inline const std::vector<std::string> kStageNames = {"dataprep", "fe00", "fe01", "fe02", "fe03", "fe04",
                                                     "fe05",     "fs00", "fs01", "pred00", "pred01", "stats"};

// Runs one stage; skips (dataset, stage) pairs whose outputs already exist
// unless create_even_if_already_exist is set.
void run_stage(const std::string& stage, const PipelineConfig& config);

// dataprep through stats, in order.
void run_all(const PipelineConfig& config);

struct StageStatus {
    std::string stage;
    std::string dataset;
    bool complete = false;
};
std::vector<StageStatus> status(const PipelineConfig& config);
std::string render_status(const std::vector<StageStatus>& rows);

// Rendered model artifact name, mirroring the training pipeline's format.
std::string model_name(const std::string& kind, const std::string& fs, const std::string& note,
                       const std::string& eval_dataset, const std::string& train_dataset,
                       const std::string& target);

// Evaluation store: long-format TSV (metric, target, algorithm, note,
// feature_selection, trained_on, evaluated_on, value).
struct StoredEvaluation {
    std::string metric, target, algorithm, note, feature_selection, trained_on, evaluated_on;
    double value = 0.0;
};
std::vector<StoredEvaluation> load_evaluations(const PipelineConfig& config);
// Pairs PRAUC/RCE rows into EvalRecords, dropping single-metric results.
std::vector<EvalRecord> evaluation_records(const std::vector<StoredEvaluation>& rows);

struct BestResultRow {
    std::string target, algorithm, note, feature_selection, trained_on, evaluated_on;
    double value = 0.0;
};
struct Report {
    std::vector<BestResultRow> best_prauc;  // one row per target
    std::vector<BestResultRow> best_rce;
    FactorSuiteResult suite;
};
Report report(const PipelineConfig& config);
std::string render_report(const Report& r);

}  // namespace ctxengage
