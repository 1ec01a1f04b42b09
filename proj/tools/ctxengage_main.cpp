#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ctxengage/pipeline.hpp"
#include "ctxengage/sampling.hpp"
#include "ctxengage/synthgen.hpp"
#include "ctxengage/table_io.hpp"
#include "ctxengage/tsv.hpp"

namespace {

using namespace ctxengage;

std::string default_root() {
    const char* env = std::getenv("CTXENGAGE_ROOT");
    return env ? env : "";
}

void apply_common_overrides(PipelineConfig& config, const std::string& root, std::uint64_t seed, bool dev,
                            bool recreate, bool rewrite_models, bool no_recreate_missing, double alpha) {
    if (!root.empty()) config.root = root;
    if (seed != 0) config.seed = seed;
    if (dev) config.dev = true;
    if (recreate) config.create_even_if_already_exist = true;
    if (rewrite_models) config.rewrite_existing_models = true;
    if (no_recreate_missing) config.recreate_missing_models = false;
    if (alpha > 0.0) config.alpha = alpha;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"context-only tweet engagement prediction pipeline"};
    app.require_subcommand(1);

    std::string root = default_root();
    std::string config_file;
    std::uint64_t seed = 0;
    bool dev = false, recreate = false, rewrite_models = false, no_recreate_missing = false;
    double alpha = 0.0;
    app.add_option("--root", root, "artifact tree root (or CTXENGAGE_ROOT)");
    app.add_option("--config", config_file, "pipeline config file (key = value lines)");
    app.add_option("--seed", seed, "pipeline seed override");
    app.add_flag("--dev", dev, "process only the 1% subsets");
    app.add_flag("--create-even-if-already-exist", recreate, "recreate and rewrite existing stage outputs");
    app.add_flag("--rewrite-existing-models", rewrite_models, "refit and rewrite persisted models");
    app.add_flag("--no-recreate-missing-models", no_recreate_missing,
                 "skip refitting models whose evaluations already exist");
    app.add_option("--alpha", alpha, "significance threshold for the stats stage");

    auto* synth = app.add_subcommand("synthgen", "generate a deterministic synthetic corpus");
    std::string synth_config;
    synth->add_option("--params", synth_config, "synthesis config file (key = value lines)");

    auto* sample_cmd = app.add_subcommand("sample", "sample one subset from a full source table");
    std::string sample_source = "train", sample_technique_name = "random";
    int sample_percent = 1;
    std::uint64_t sample_seed = 1;
    sample_cmd->add_option("--source", sample_source, "train | val | test | val+test");
    sample_cmd->add_option("--technique", sample_technique_name, "random | EU | EWU | inter_EWU+EU | tweet");
    sample_cmd->add_option("--percent", sample_percent, "1 | 2 | 5 | 10");
    sample_cmd->add_option("--seed", sample_seed, "sampling seed");

    auto* stage_cmd = app.add_subcommand("stage", "run one pipeline stage");
    std::string stage_name;
    stage_cmd->add_option("name", stage_name, "dataprep | fe00..fe05 | fs00 | fs01 | pred00 | pred01 | stats")
        ->required();

    auto* run_all_cmd = app.add_subcommand("run-all", "run every stage in order");
    auto* status_cmd = app.add_subcommand("status", "print the stage completion matrix");
    auto* report_cmd = app.add_subcommand("report", "print best results and factor statistics");

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig config;
        if (!config_file.empty()) config = pipeline_config_from_file(config_file);
        apply_common_overrides(config, root, seed, dev, recreate, rewrite_models, no_recreate_missing, alpha);

        if (synth->parsed()) {
            SynthConfig sc = synth_config.empty() ? SynthConfig{} : synth_config_from_file(synth_config);
            if (config.root.empty()) throw std::runtime_error("synthgen needs --root or CTXENGAGE_ROOT");
            ColumnTable raw = synth_generate(sc);
            write_table(raw, "raw", config.tables_dir(), true);
            std::cout << "wrote raw corpus: " << raw.row_count() << " rows\n";
        } else if (sample_cmd->parsed()) {
            config.validate();
            DatasetId full{sample_source, "full", 100, ""};
            ColumnTable source = read_table(full, config.tables_dir());
            ColumnTable out = sample_technique(source, sample_technique_name, sample_percent, sample_seed);
            DatasetId id{sample_source, sample_technique_name, sample_percent, ""};
            validate_dataset_id(id);
            write_table(out, id, config.tables_dir(), true);
            std::cout << "wrote " << id.render() << ": " << out.row_count() << " rows\n";
        } else if (stage_cmd->parsed()) {
            run_stage(stage_name, config);
            std::cout << "stage " << stage_name << " complete\n";
        } else if (run_all_cmd->parsed()) {
            run_all(config);
            std::cout << "pipeline complete\n";
        } else if (status_cmd->parsed()) {
            config.validate();
            std::cout << render_status(status(config));
        } else if (report_cmd->parsed()) {
            config.validate();
            std::cout << render_report(report(config));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
