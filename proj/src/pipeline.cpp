#include "ctxengage/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ctxengage/config_file.hpp"
#include "ctxengage/feat_encode.hpp"
#include "ctxengage/feat_graph.hpp"
#include "ctxengage/feat_history.hpp"
#include "ctxengage/feat_time.hpp"
#include "ctxengage/eval_metrics.hpp"
#include "ctxengage/learn.hpp"
#include "ctxengage/prng.hpp"
#include "ctxengage/registry.hpp"
#include "ctxengage/sampling.hpp"
#include "ctxengage/synthgen.hpp"
#include "ctxengage/table_io.hpp"

namespace ctxengage {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --- Small bounded worker pool for dataset-level tasks -------------------

void parallel_for_each(std::size_t count, const std::function<void(std::size_t)>& task) {
    if (count == 0) return;
    unsigned workers = std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                                          static_cast<unsigned>(count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

// --- Manifests ------------------------------------------------------------

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (c == '/' || c == '+') c = '~';
    return out;
}

fs::path manifest_path(const PipelineConfig& config, const std::string& stage, const std::string& scope) {
    return config.manifests_dir() / (stage + "__" + sanitize(scope) + ".done");
}

bool manifest_exists(const PipelineConfig& config, const std::string& stage, const std::string& scope) {
    return fs::exists(manifest_path(config, stage, scope));
}

void write_manifest(const PipelineConfig& config, const std::string& stage, const std::string& scope) {
    fs::create_directories(config.manifests_dir());
    fs::path target = manifest_path(config, stage, scope);
    fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << "done\n";
    }
    fs::rename(tmp, target);
}

bool should_skip(const PipelineConfig& config, const std::string& stage, const std::string& scope) {
    return !config.create_even_if_already_exist && manifest_exists(config, stage, scope);
}

// --- Common loaders -------------------------------------------------------

ColumnTable load_stage_table(const PipelineConfig& config, const DatasetId& id) {
    if (!stage_exists(id, config.tables_dir()))
        throw std::runtime_error("missing upstream stage artifact: " + id.render() +
                                 " (run the producing stage first)");
    return read_table(id, config.tables_dir());
}

DatasetId train_counterpart(const DatasetId& id) {
    DatasetId out = id;
    out.source = "train";
    return out;
}

std::string tuning_path(const PipelineConfig& config, const std::string& kind, const std::string& train_name,
                        const std::string& fs_name, const std::string& note, const std::string& target) {
    return (config.models_dir() / "tuning" /
            (kind + "__" + sanitize(train_name) + "__" + fs_name + "__" + note + "__" + target + ".json"))
        .string();
}

// Technique/percent factors parsed back from a rendered dataset name.
std::pair<std::string, std::string> technique_percent_of(const std::string& dataset_name) {
    auto pos = dataset_name.find("_sample_");
    if (pos == std::string::npos) return {"full", "100"};
    auto us = dataset_name.find('_');
    std::string technique = dataset_name.substr(us + 1, pos - us - 1);
    std::string pct = dataset_name.substr(pos + 8);
    if (pct.size() > 3 && pct.substr(pct.size() - 3) == "pct") pct = pct.substr(0, pct.size() - 3);
    return {technique, pct};
}

// --- Evaluation store ------------------------------------------------------

std::string eval_key(const StoredEvaluation& e) {
    return e.metric + '\t' + e.target + '\t' + e.algorithm + '\t' + e.note + '\t' + e.feature_selection + '\t' +
           e.trained_on + '\t' + e.evaluated_on;
}

class EvalStore {
public:
    explicit EvalStore(const PipelineConfig& config) : config_(config) {
        for (auto& row : load_evaluations(config)) rows_.emplace(eval_key(row), row);
        initial_size_ = rows_.size();
    }

    bool contains(const StoredEvaluation& probe) const {
        std::lock_guard<std::mutex> lock(mutex_);
        return rows_.count(eval_key(probe)) != 0;
    }

    void add(StoredEvaluation row) {
        std::lock_guard<std::mutex> lock(mutex_);
        rows_.emplace(eval_key(row), std::move(row));
    }

    void flush() {
        if (rows_.size() == initial_size_) return;
        fs::create_directories(config_.evaluations_path().parent_path());
        fs::path tmp = config_.evaluations_path().string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            out << "metric\ttarget\talgorithm\tnote\tfeature_selection\ttrained_on\tevaluated_on\tvalue\n";
            for (const auto& [key, e] : rows_) {
                out << e.metric << '\t' << e.target << '\t' << e.algorithm << '\t' << e.note << '\t'
                    << e.feature_selection << '\t' << e.trained_on << '\t' << e.evaluated_on << '\t'
                    << format_double(e.value) << '\n';
            }
        }
        fs::rename(tmp, config_.evaluations_path());
        initial_size_ = rows_.size();
    }

private:
    const PipelineConfig& config_;
    std::map<std::string, StoredEvaluation> rows_;  // sorted -> deterministic file
    std::size_t initial_size_ = 0;
    mutable std::mutex mutex_;
};

// Prediction-stage manifests are scoped by the factor lists they covered, so
// a widened config reruns the stage while per-task checks skip finished work.
std::string config_fingerprint(const PipelineConfig& config) {
    std::string blob;
    auto append = [&blob](const std::string& s) {
        blob += s;
        blob += ';';
    };
    for (const auto& s : config.import_datasets) append(s);
    for (const auto& s : config.sampling_techniques) append(s);
    for (int p : config.sampling_percentages) append(std::to_string(p));
    for (int p : config.evaluation_percentages) append(std::to_string(p));
    for (const auto& s : config.classifier_names) append(s);
    for (const auto& s : config.top_ns) append(s);
    for (const auto& s : config.features_notes) append(s);
    append(config.dev ? "dev" : "");
    append(std::to_string(config.seed));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash64(blob)));
    return std::string(buf);
}

// --- Frame loading ----------------------------------------------------------

FeatureFrame load_frame(const PipelineConfig& config, const DatasetId& id) {
    DatasetId chisq = id.with_prefix("ChiSq_");
    ColumnTable table = load_stage_table(config, chisq);
    DatasetId train = train_counterpart(id);
    auto catmodel =
        load_categorisation((config.tables_dir() / (train.with_prefix("Categorised_").render() + ".catmodel.json"))
                                .string());
    auto selections =
        load_selections((config.tables_dir() / (chisq.render() + ".selections.json")).string());
    return FeatureFrame(std::move(table), std::move(catmodel), std::move(selections));
}

// --- Stage implementations ---------------------------------------------------

void stage_dataprep(const PipelineConfig& config) {
    const std::string stage = "dataprep";
    if (!config.create_even_if_already_exist) {
        bool all_present = true;
        for (const auto& source : config.import_datasets)
            all_present = all_present && stage_exists(DatasetId{source, "full", 100, ""}, config.tables_dir());
        for (const auto& id : config.datasets())
            all_present = all_present && stage_exists(id, config.tables_dir());
        if (all_present) {
            if (!manifest_exists(config, stage, "all")) write_manifest(config, stage, "all");
            return;
        }
    }
    fs::create_directories(config.tables_dir());

    if (!stage_exists("raw", config.tables_dir()))
        throw std::runtime_error("missing raw input table; run `ctxengage synthgen` or import a TSV first");
    ColumnTable raw = read_table("raw", config.tables_dir());

    auto [train, holdout] = split_by_week(raw);

    // val/test partition of the holdout week by tweet-id hash parity; the
    // split is deterministic and tweet-disjoint.
    const auto& tweet_ids = holdout.strings("tweet_id");
    std::vector<std::size_t> val_rows, test_rows;
    for (std::size_t i = 0; i < tweet_ids.size(); ++i) {
        (hash64(tweet_ids[i], 0x7e57) % 2 == 0 ? val_rows : test_rows).push_back(i);
    }

    auto with_row_index = [](const ColumnTable& t) {
        Int64Data idx;
        idx.values.resize(t.row_count());
        for (std::size_t i = 0; i < t.row_count(); ++i) idx.values[i] = static_cast<std::int64_t>(i);
        return t.with_column("row_index", Column(std::move(idx)));
    };

    std::map<std::string, ColumnTable> sources;
    sources["train"] = with_row_index(train);
    sources["val"] = with_row_index(holdout.take_rows(val_rows));
    sources["test"] = with_row_index(holdout.take_rows(test_rows));
    sources["val+test"] = with_row_index(holdout);

    for (const auto& source : config.import_datasets) {
        DatasetId full{source, "full", 100, ""};
        if (config.create_even_if_already_exist || !stage_exists(full, config.tables_dir()))
            write_table(sources.at(source), full, config.tables_dir(), true);
    }

    std::vector<DatasetId> subsets;
    for (const auto& id : config.datasets())
        if (!id.is_full()) subsets.push_back(id);
    parallel_for_each(subsets.size(), [&](std::size_t i) {
        const DatasetId& id = subsets[i];
        if (!config.create_even_if_already_exist && stage_exists(id, config.tables_dir())) return;
        ColumnTable sample = sample_technique(sources.at(id.source), id.technique, id.percent,
                                              stream_seed(config.seed, id.render()));
        write_table(sample, id, config.tables_dir(), true);
    });
    write_manifest(config, stage, "all");
}

void run_table_stage(const PipelineConfig& config, const std::string& stage, const std::string& in_prefix,
                     const std::string& out_prefix,
                     const std::function<ColumnTable(const PipelineConfig&, const DatasetId&)>& make) {
    auto ids = config.datasets();
    // Train datasets first: holdout processing may depend on train outputs.
    std::stable_partition(ids.begin(), ids.end(), [](const DatasetId& id) { return id.source == "train"; });
    auto run_wave = [&](bool train_wave) {
        std::vector<DatasetId> wave;
        for (const auto& id : ids)
            if ((id.source == "train") == train_wave) wave.push_back(id);
        parallel_for_each(wave.size(), [&](std::size_t i) {
            DatasetId id = wave[i].with_prefix(in_prefix);
            DatasetId out = wave[i].with_prefix(out_prefix);
            if (should_skip(config, stage, out.render())) return;
            ColumnTable result = make(config, id);
            write_table(result, out, config.tables_dir(), true);
            write_manifest(config, stage, out.render());
        });
    };
    run_wave(true);
    run_wave(false);
}

ColumnTable make_fe02(const PipelineConfig& config, const DatasetId& id) {
    ColumnTable table = load_stage_table(config, id);
    DatasetId train = train_counterpart(id);
    ColumnTable train_table = id.source == "train" ? table : load_stage_table(config, train);

    GraphScopes graphs;
    {
        std::vector<const ColumnTable*> scope;
        ColumnTable extra;
        if (id.source == "train") {
            scope = {&table};
        } else if (id.source == "val" || id.source == "val+test") {
            scope = {&train_table, &table};
        } else {  // test: train + val + test
            DatasetId val = id;
            val.source = "val";
            extra = load_stage_table(config, val);
            scope = {&train_table, &extra, &table};
        }
        graphs.follow = build_follow_graph(scope);
    }
    for (const auto& engagement : kEngagements)
        graphs.engagement.push_back(build_engagement_graph(train_table, engagement));

    return follower_ratios(annotate_graph_features(table, graphs));
}

ColumnTable make_fe03(const PipelineConfig& config, const DatasetId& id) {
    ColumnTable table = load_stage_table(config, id);
    ColumnTable augmented;
    if (id.source == "train") {
        augmented = mark_no_history(table);
    } else {
        ColumnTable train_table = load_stage_table(config, train_counterpart(id));
        augmented = prepend_history_48h(train_table, table);
    }
    return add_time_features(augmented);
}

ColumnTable make_fe04(const PipelineConfig& config, const DatasetId& id) {
    ColumnTable table = load_stage_table(config, id);
    ColumnTable train_table = id.source == "train" ? table : load_stage_table(config, train_counterpart(id));
    HistorySplit split = designate_history(train_table, table, id.source);
    return add_history_features(split.history, split.remainder);
}

ColumnTable make_fe05(const PipelineConfig& config, const DatasetId& id) {
    // id arrives with the GraphBased_ prefix.
    ColumnTable graph_stage = load_stage_table(config, id);
    ColumnTable time_stage = load_stage_table(config, id.with_prefix("Time_"));
    ColumnTable engagement_stage = load_stage_table(config, id.with_prefix("Engagement_"));
    return merge_final(graph_stage, time_stage, engagement_stage);
}

void stage_fs00(const PipelineConfig& config) {
    run_table_stage(config, "fs00", "Final_", "Categorised_",
                    [](const PipelineConfig& cfg, const DatasetId& id) {
                        ColumnTable final_table = load_stage_table(cfg, id);
                        DatasetId out_id = id.with_prefix("Categorised_");
                        std::string model_file =
                            (cfg.tables_dir() / (out_id.render() + ".catmodel.json")).string();
                        if (id.source == "train") {
                            auto [categorised, model] = categorise(final_table);
                            save_categorisation(model, model_file);
                            return categorised;
                        }
                        DatasetId train_cat = train_counterpart(id).with_prefix("Categorised_");
                        auto model = load_categorisation(
                            (cfg.tables_dir() / (train_cat.render() + ".catmodel.json")).string());
                        return apply_categorisation(model, final_table);
                    });
}

void stage_fs01(const PipelineConfig& config) {
    run_table_stage(config, "fs01", "Categorised_", "ChiSq_",
                    [](const PipelineConfig& cfg, const DatasetId& id) {
                        ColumnTable categorised = load_stage_table(cfg, id);
                        DatasetId out_id = id.with_prefix("ChiSq_");
                        std::string selections_file =
                            (cfg.tables_dir() / (out_id.render() + ".selections.json")).string();
                        DatasetId train_cat = train_counterpart(id).with_prefix("Categorised_");
                        auto model = load_categorisation(
                            (cfg.tables_dir() / (train_cat.render() + ".catmodel.json")).string());
                        if (id.source == "train") {
                            SelectionSet selections = compute_selections(categorised, model);
                            save_selections(selections, selections_file);
                        } else {
                            // Selection done on the train dataset, reused here.
                            DatasetId train_sel = train_counterpart(id).with_prefix("ChiSq_");
                            SelectionSet selections = load_selections(
                                (cfg.tables_dir() / (train_sel.render() + ".selections.json")).string());
                            save_selections(selections, selections_file);
                        }
                        return categorised;
                    });
}

struct ModelTask {
    std::string kind, fs_name, note, target;
    DatasetId dataset;
};

std::vector<ModelTask> model_tasks(const PipelineConfig& config) {
    std::vector<ModelTask> tasks;
    for (const auto& id : config.datasets())
        for (const auto& kind : config.classifier_names)
            for (const auto& note : config.features_notes)
                for (const auto& fs_name : config.top_ns)
                    for (const auto& target : kEngagements)
                        tasks.push_back({kind, fs_name, note, target, id});
    return tasks;
}

ParamMap tune_or_load(const PipelineConfig& config, const ModelTask& task, const FeatureFrame& train_frame) {
    std::string path =
        tuning_path(config, task.kind, train_counterpart(task.dataset).render(), task.fs_name, task.note,
                    task.target);
    if (!config.rewrite_existing_models && fs::exists(path)) {
        std::ifstream in(path);
        json j = json::parse(in);
        return j.at("best_params").get<ParamMap>();
    }
    auto X = train_frame.gather(vector_column_name(task.fs_name, task.note, task.target));
    auto y = train_frame.labels(task.target);
    auto cv = cross_validate(X, y, task.kind, stream_seed(config.seed, "cv:" + path));
    json j;
    j["best_params"] = cv.best_params;
    j["best_mean_rce"] = cv.best_mean_rce;
    j["degenerate_folds"] = cv.degenerate_folds;
    json cells = json::array();
    for (const auto& [cell, score] : cv.cell_scores) cells.push_back({{"params", cell}, {"mean_rce", score}});
    j["cells"] = cells;
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path + ".tmp", std::ios::trunc);
    out << j.dump(1) << '\n';
    out.close();
    fs::rename(path + ".tmp", path);
    return cv.best_params;
}

void save_model(const ClassifierModel& model, const std::vector<std::string>& features,
                const std::string& vector_column, const std::string& path) {
    json j = json::parse(model.to_json());
    j["features"] = features;
    j["vector_column"] = vector_column;
    std::ofstream out(path + ".tmp", std::ios::trunc);
    out << j.dump(1) << '\n';
    out.close();
    fs::rename(path + ".tmp", path);
}

std::pair<ClassifierModel, std::vector<std::string>> load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ClassifierModel model = ClassifierModel::from_json(ss.str());
    json j = json::parse(ss.str());
    return {std::move(model), j.at("features").get<std::vector<std::string>>()};
}

// Computes both metrics; returns false when either is undefined for these
// labels (single-class evaluation sets produce no record at all).
bool evaluate_pair(std::span<const std::int64_t> labels, std::span<const double> preds, double* out_prauc,
                   double* out_rce) {
    std::vector<std::uint8_t> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] ? 1 : 0;
    try {
        *out_prauc = prauc(y, preds);
        *out_rce = rce(y, preds);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

void add_eval_records(EvalStore& store, const ModelTask& task, const std::string& trained_on,
                      const std::string& evaluated_on, double prauc_v, double rce_v) {
    StoredEvaluation base;
    base.target = task.target;
    base.algorithm = task.kind;
    base.note = task.note;
    base.feature_selection = task.fs_name;
    base.trained_on = trained_on;
    base.evaluated_on = evaluated_on;
    base.metric = "PRAUC";
    base.value = prauc_v;
    store.add(base);
    base.metric = "RCE";
    base.value = rce_v;
    store.add(base);
}

void stage_pred00(const PipelineConfig& config) {
    const std::string stage = "pred00";
    const std::string scope = config_fingerprint(config);
    if (should_skip(config, stage, scope)) return;
    fs::create_directories(config.models_dir());
    EvalStore store(config);

    auto tasks = model_tasks(config);
    // Frames cached per dataset; tuning frames per train counterpart.
    std::map<std::string, FeatureFrame> frames;
    std::mutex frames_mutex;
    auto frame_for = [&](const DatasetId& id) -> const FeatureFrame& {
        std::lock_guard<std::mutex> lock(frames_mutex);
        auto name = id.render();
        auto it = frames.find(name);
        if (it == frames.end()) it = frames.emplace(name, load_frame(config, id)).first;
        return it->second;
    };

    parallel_for_each(tasks.size(), [&](std::size_t i) {
        const ModelTask& task = tasks[i];
        const std::string dataset_name = task.dataset.render();
        const std::string name =
            model_name(task.kind, task.fs_name, task.note, dataset_name, dataset_name, task.target);
        const std::string model_path = (config.models_dir() / (name + ".json")).string();

        StoredEvaluation probe;
        probe.metric = "PRAUC";
        probe.target = task.target;
        probe.algorithm = task.kind;
        probe.note = task.note;
        probe.feature_selection = task.fs_name;
        probe.trained_on = dataset_name;
        probe.evaluated_on = dataset_name;
        const bool eval_done = store.contains(probe);
        const bool model_present = fs::exists(model_path);

        if (!config.rewrite_existing_models && eval_done &&
            (model_present || !config.recreate_missing_models))
            return;

        const FeatureFrame& train_frame = frame_for(train_counterpart(task.dataset));
        ParamMap params = tune_or_load(config, task, train_frame);

        const FeatureFrame& frame = frame_for(task.dataset);
        const std::string vector_column = vector_column_name(task.fs_name, task.note, task.target);

        ClassifierModel model;
        std::vector<std::string> features;
        if (model_present && !config.rewrite_existing_models) {
            std::tie(model, features) = load_model(model_path);
        } else {
            features = frame.selections().vectors.at(vector_column);
            auto X = frame.gather(vector_column);
            auto y = frame.labels(task.target);
            bool pos = false, neg = false;
            for (auto v : y) (v ? pos : neg) = true;
            if (!pos || !neg) return;  // degenerate subset; no model, no record
            model = train_classifier(task.kind, params, X, y,
                                     stream_seed(config.seed, "fit:" + name));
            save_model(model, features, vector_column, model_path);
        }

        if (!eval_done) {
            auto X = frame.gather_features(features);
            auto y = frame.labels(task.target);
            auto preds = model.predict_proba(X);
            double prauc_v = 0.0, rce_v = 0.0;
            if (evaluate_pair(y, preds, &prauc_v, &rce_v))
                add_eval_records(store, task, dataset_name, dataset_name, prauc_v, rce_v);
        }
    });
    store.flush();
    write_manifest(config, stage, scope);
}

void stage_pred01(const PipelineConfig& config) {
    const std::string stage = "pred01";
    const std::string scope = config_fingerprint(config);
    if (should_skip(config, stage, scope)) return;
    EvalStore store(config);

    std::vector<DatasetId> eval_ids;
    for (const auto& source : config.import_datasets) {
        for (const auto& technique : config.sampling_techniques) {
            for (int percent : config.evaluation_percentages) {
                if (config.dev && percent != 1) continue;
                eval_ids.push_back(DatasetId{source, technique, percent, ""});
            }
        }
    }

    std::map<std::string, FeatureFrame> frames;
    for (const auto& id : eval_ids)
        frames.emplace(id.render(), load_frame(config, id));

    auto tasks = model_tasks(config);
    std::map<std::string, std::pair<ClassifierModel, std::vector<std::string>>> model_cache;
    std::mutex cache_mutex;

    parallel_for_each(tasks.size(), [&](std::size_t i) {
        const ModelTask& task = tasks[i];
        const std::string trained_on = task.dataset.render();
        const std::string name = model_name(task.kind, task.fs_name, task.note, trained_on, trained_on,
                                            task.target);
        const std::string model_path = (config.models_dir() / (name + ".json")).string();
        if (!fs::exists(model_path)) return;  // degenerate subsets produce no model

        const std::pair<ClassifierModel, std::vector<std::string>>* model_entry = nullptr;
        {
            std::lock_guard<std::mutex> lock(cache_mutex);
            auto it = model_cache.find(model_path);
            if (it == model_cache.end()) it = model_cache.emplace(model_path, load_model(model_path)).first;
            model_entry = &it->second;
        }

        for (const auto& eval_id : eval_ids) {
            const std::string evaluated_on = eval_id.render();
            StoredEvaluation probe;
            probe.metric = "PRAUC";
            probe.target = task.target;
            probe.algorithm = task.kind;
            probe.note = task.note;
            probe.feature_selection = task.fs_name;
            probe.trained_on = trained_on;
            probe.evaluated_on = evaluated_on;
            if (store.contains(probe)) continue;

            const FeatureFrame& frame = frames.at(evaluated_on);
            auto X = frame.gather_features(model_entry->second);
            auto y = frame.labels(task.target);
            auto preds = model_entry->first.predict_proba(X);
            double prauc_v = 0.0, rce_v = 0.0;
            if (evaluate_pair(y, preds, &prauc_v, &rce_v))
                add_eval_records(store, task, trained_on, evaluated_on, prauc_v, rce_v);
        }
    });
    store.flush();
    write_manifest(config, stage, scope);
}

void stage_stats(const PipelineConfig& config) {
    const std::string stage = "stats";
    const std::string scope = config_fingerprint(config);
    if (should_skip(config, stage, scope)) return;
    auto records = evaluation_records(load_evaluations(config));
    auto suite = run_factor_suite(records, config.alpha);

    fs::create_directories(config.stats_dir());
    auto fixed = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    {
        fs::path tmp = config.stats_dir() / "friedman.tsv.tmp";
        std::ofstream out(tmp, std::ios::trunc);
        out << "metric\ttarget\twithin\tbalanced on\tW\tddof1\tQ\tp-corr\n";
        for (const auto& t : suite.friedman_tests) {
            if (!t.ran) continue;
            out << t.metric << '\t' << t.target << '\t' << t.factor << '\t' << t.balanced_on << '\t'
                << fixed(t.result.W) << '\t' << t.result.ddof1 << '\t' << fixed(t.result.Q) << '\t'
                << fixed(t.result.p_corr) << '\n';
        }
        out.close();
        fs::rename(tmp, config.stats_dir() / "friedman.tsv");
    }
    {
        fs::path tmp = config.stats_dir() / "friedman_skipped.tsv.tmp";
        std::ofstream out(tmp, std::ios::trunc);
        out << "metric\ttarget\twithin\treason\n";
        for (const auto& t : suite.friedman_tests) {
            if (t.ran) continue;
            out << t.metric << '\t' << t.target << '\t' << t.factor << '\t' << t.skip_reason << '\n';
        }
        out.close();
        fs::rename(tmp, config.stats_dir() / "friedman_skipped.tsv");
    }
    {
        fs::path tmp = config.stats_dir() / "posthoc.tsv.tmp";
        std::ofstream out(tmp, std::ios::trunc);
        out << "metric\ttarget\twithin\tA\tB\tp-unc\tp-corr\n";
        for (const auto& p : suite.posthoc) {
            out << p.metric << '\t' << p.target << '\t' << p.factor << '\t' << p.level_a << '\t' << p.level_b
                << '\t' << fixed(p.p) << '\t' << fixed(p.p_corr) << '\n';
        }
        out.close();
        fs::rename(tmp, config.stats_dir() / "posthoc.tsv");
    }
    write_manifest(config, stage, scope);
}

}  // namespace

void PipelineConfig::validate() const {
    if (root.empty()) throw std::runtime_error("pipeline root not set (use --root or CTXENGAGE_ROOT)");
    for (const auto& s : import_datasets)
        if (std::find(kSources.begin(), kSources.end(), s) == kSources.end())
            throw std::runtime_error("bad source in import-datasets: " + s);
    for (const auto& t : sampling_techniques)
        if (std::find(kTechniques.begin(), kTechniques.end(), t) == kTechniques.end())
            throw std::runtime_error("bad technique in sampling-techniques: " + t);
    for (int p : sampling_percentages)
        if (std::find(kPercents.begin(), kPercents.end(), p) == kPercents.end())
            throw std::runtime_error("bad percent in sampling-percentages: " + std::to_string(p));
    for (const auto& c : classifier_names)
        if (std::find(kClassifierKinds.begin(), kClassifierKinds.end(), c) == kClassifierKinds.end())
            throw std::runtime_error("bad classifier in classifier-names: " + c);
    for (const auto& n : top_ns)
        if (n != "all" && n != "top_5" && n != "top_10" && n != "top_25" && n != "top_50")
            throw std::runtime_error("bad feature selection in top-ns: " + n);
    for (const auto& n : features_notes)
        if (n != "scaled" && n != "oracle_scaled")
            throw std::runtime_error("bad note in features-notes: " + n);
    if (alpha <= 0.0 || alpha >= 1.0) throw std::runtime_error("alpha must be in (0, 1)");
}

std::vector<DatasetId> PipelineConfig::datasets() const {
    std::vector<DatasetId> out;
    for (const auto& source : import_datasets) {
        if (!dev) out.push_back(DatasetId{source, "full", 100, ""});
        for (const auto& technique : sampling_techniques) {
            for (int percent : sampling_percentages) {
                if (dev && percent != 1) continue;
                out.push_back(DatasetId{source, technique, percent, ""});
            }
        }
    }
    return out;
}

PipelineConfig pipeline_config_from_file(const std::string& path) {
    auto kv = KeyValueConfig::parse_file(path);
    PipelineConfig out;
    out.root = kv.get_string("root", "");
    out.seed = static_cast<std::uint64_t>(kv.get_int("seed", 1));
    out.create_even_if_already_exist = kv.get_bool("create-even-if-already-exist", false);
    out.dev = kv.get_bool("dev", false);
    out.rewrite_existing_models = kv.get_bool("rewrite-existing-models", false);
    out.recreate_missing_models = kv.get_bool("recreate-missing-models", true);
    out.import_datasets = kv.get_list("import-datasets", out.import_datasets);
    out.sampling_techniques = kv.get_list("sampling-techniques", out.sampling_techniques);
    auto pct_list = kv.get_list("sampling-percentages", {});
    if (!pct_list.empty()) {
        out.sampling_percentages.clear();
        for (const auto& p : pct_list) out.sampling_percentages.push_back(std::stoi(p));
    }
    auto eval_list = kv.get_list("evaluation-percentages", {});
    if (!eval_list.empty()) {
        out.evaluation_percentages.clear();
        for (const auto& p : eval_list) out.evaluation_percentages.push_back(std::stoi(p));
    }
    out.classifier_names = kv.get_list("classifier-names", out.classifier_names);
    out.top_ns = kv.get_list("top-ns", out.top_ns);
    out.features_notes = kv.get_list("features-notes", out.features_notes);
    out.alpha = kv.get_double("alpha", 0.05);
    kv.reject_unknown_keys();
    return out;
}

void run_stage(const std::string& stage, const PipelineConfig& config) {
    config.validate();
    if (stage == "dataprep") {
        stage_dataprep(config);
    } else if (stage == "fe00") {
        run_table_stage(config, "fe00", "", "FE_",
                        [](const PipelineConfig& cfg, const DatasetId& id) {
                            return derive_labels(load_stage_table(cfg, id));
                        });
    } else if (stage == "fe01") {
        run_table_stage(config, "fe01", "FE_", "Encoding_",
                        [](const PipelineConfig& cfg, const DatasetId& id) {
                            return encode_all(load_stage_table(cfg, id));
                        });
    } else if (stage == "fe02") {
        run_table_stage(config, "fe02", "Encoding_", "GraphBased_", make_fe02);
    } else if (stage == "fe03") {
        run_table_stage(config, "fe03", "Encoding_", "Time_", make_fe03);
    } else if (stage == "fe04") {
        run_table_stage(config, "fe04", "Encoding_", "Engagement_", make_fe04);
    } else if (stage == "fe05") {
        run_table_stage(config, "fe05", "GraphBased_", "Final_", make_fe05);
    } else if (stage == "fs00") {
        stage_fs00(config);
    } else if (stage == "fs01") {
        stage_fs01(config);
    } else if (stage == "pred00") {
        stage_pred00(config);
    } else if (stage == "pred01") {
        stage_pred01(config);
    } else if (stage == "stats") {
        stage_stats(config);
    } else {
        throw std::runtime_error("unknown stage: " + stage);
    }
}

void run_all(const PipelineConfig& config) {
    for (const auto& stage : kStageNames) run_stage(stage, config);
}

std::vector<StageStatus> status(const PipelineConfig& config) {
    std::vector<StageStatus> rows;
    const std::vector<std::pair<std::string, std::string>> table_stages = {
        {"dataprep", ""},     {"fe00", "FE_"},          {"fe01", "Encoding_"}, {"fe02", "GraphBased_"},
        {"fe03", "Time_"},    {"fe04", "Engagement_"},  {"fe05", "Final_"},    {"fs00", "Categorised_"},
        {"fs01", "ChiSq_"},
    };
    for (const auto& id : config.datasets()) {
        for (const auto& [stage, prefix] : table_stages) {
            rows.push_back({stage, id.render(), stage_exists(id.with_prefix(prefix), config.tables_dir())});
        }
    }
    for (const char* stage : {"pred00", "pred01", "stats"})
        rows.push_back({stage, "(all datasets)", manifest_exists(config, stage, config_fingerprint(config))});
    return rows;
}

std::string render_status(const std::vector<StageStatus>& rows) {
    std::ostringstream out;
    out << "stage\tdataset\tstate\n";
    for (const auto& r : rows) out << r.stage << '\t' << r.dataset << '\t' << (r.complete ? "done" : "pending") << '\n';
    return out.str();
}

std::string model_name(const std::string& kind, const std::string& fs_name, const std::string& note,
                       const std::string& eval_dataset, const std::string& train_dataset,
                       const std::string& target) {
    return "classifier_model_of_type-" + kind + "-for_features-" + fs_name + "-" + note + "-" +
           "-for_dataset-" + eval_dataset + "-based_on_dataset-" + train_dataset + "-predicting_target-" +
           target + "-ht";
}

std::vector<StoredEvaluation> load_evaluations(const PipelineConfig& config) {
    std::vector<StoredEvaluation> out;
    std::ifstream in(config.evaluations_path());
    if (!in) return out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            auto pos = line.find('\t', start);
            cells.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (cells.size() != 8) throw std::runtime_error("corrupt evaluations.tsv row: " + line);
        StoredEvaluation e;
        e.metric = cells[0];
        e.target = cells[1];
        e.algorithm = cells[2];
        e.note = cells[3];
        e.feature_selection = cells[4];
        e.trained_on = cells[5];
        e.evaluated_on = cells[6];
        e.value = parse_double(cells[7]);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<EvalRecord> evaluation_records(const std::vector<StoredEvaluation>& rows) {
    std::map<std::string, EvalRecord> paired;
    std::map<std::string, std::pair<bool, bool>> seen;
    for (const auto& row : rows) {
        std::string key = row.target + '\t' + row.algorithm + '\t' + row.note + '\t' + row.feature_selection +
                          '\t' + row.trained_on + '\t' + row.evaluated_on;
        auto& rec = paired[key];
        rec.target = row.target;
        rec.algorithm = row.algorithm;
        rec.note = row.note;
        rec.feature_selection = row.feature_selection;
        auto [technique, percent] = technique_percent_of(row.trained_on);
        rec.to_technique = technique;
        rec.to_percent = percent;
        rec.evaluated_on = row.evaluated_on;
        if (row.metric == "PRAUC") {
            rec.prauc = row.value;
            seen[key].first = true;
        } else if (row.metric == "RCE") {
            rec.rce = row.value;
            seen[key].second = true;
        }
    }
    std::vector<EvalRecord> out;
    for (auto& [key, rec] : paired) {
        // Results with only one of the two metrics are dropped.
        if (seen[key].first && seen[key].second) out.push_back(std::move(rec));
    }
    return out;
}

Report report(const PipelineConfig& config) {
    auto rows = load_evaluations(config);
    if (rows.empty()) throw std::runtime_error("no evaluations found; run pred00/pred01 first");
    auto records = evaluation_records(rows);

    Report r;
    for (const auto& target : kEngagements) {
        const EvalRecord* best_p = nullptr;
        const EvalRecord* best_r = nullptr;
        for (const auto& rec : records) {
            if (rec.target != target) continue;
            if (!best_p || rec.prauc > best_p->prauc) best_p = &rec;
            if (!best_r || rec.rce > best_r->rce) best_r = &rec;
        }
        auto to_row = [](const EvalRecord& rec, double value) {
            BestResultRow row;
            row.target = rec.target;
            row.algorithm = rec.algorithm;
            row.note = rec.note;
            row.feature_selection = rec.feature_selection;
            row.trained_on = rec.to_technique == "full"
                                 ? "full"
                                 : rec.to_technique + "_sample_" + rec.to_percent + "pct";
            row.evaluated_on = rec.evaluated_on;
            row.value = value;
            return row;
        };
        if (best_p) r.best_prauc.push_back(to_row(*best_p, best_p->prauc));
        if (best_r) r.best_rce.push_back(to_row(*best_r, best_r->rce));
    }
    r.suite = run_factor_suite(records, config.alpha);
    return r;
}

std::string render_report(const Report& r) {
    std::ostringstream out;
    auto fixed = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    out << "Best PRAUC overall\n";
    out << "target\talgorithm\tnote\tfs\ttrained\tevaluated\tPRAUC\n";
    for (const auto& row : r.best_prauc)
        out << row.target << '\t' << row.algorithm << '\t' << row.note << '\t' << row.feature_selection << '\t'
            << row.trained_on << '\t' << row.evaluated_on << '\t' << fixed(row.value) << '\n';
    out << "\nBest RCE overall\n";
    out << "target\talgorithm\tnote\tfs\ttrained\tevaluated\tRCE\n";
    for (const auto& row : r.best_rce)
        out << row.target << '\t' << row.algorithm << '\t' << row.note << '\t' << row.feature_selection << '\t'
            << row.trained_on << '\t' << row.evaluated_on << '\t' << fixed(row.value) << '\n';
    out << "\nFriedman tests\n";
    out << "metric\ttarget\twithin\tbalanced on\tW\tddof1\tQ\tp-corr\n";
    for (const auto& t : r.suite.friedman_tests) {
        if (!t.ran) continue;
        out << t.metric << '\t' << t.target << '\t' << t.factor << '\t' << t.balanced_on << '\t'
            << fixed(t.result.W) << '\t' << t.result.ddof1 << '\t' << fixed(t.result.Q) << '\t'
            << fixed(t.result.p_corr) << '\n';
    }
    return out.str();
}

}  // namespace ctxengage
