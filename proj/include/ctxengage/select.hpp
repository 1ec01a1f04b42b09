#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxengage/column_table.hpp"

namespace ctxengage {

// Stage FS00 (categorisation/binning) and FS01 (chi-squared selection and
// vectorisation).

// String indexing: codes 0,1,2,... by descending frequency, ties broken by
// ascending lexicographic order of the value.
struct StringIndexModel {
    std::vector<std::string> values;  // code -> value
    std::map<std::string, std::int64_t> codes;
};
StringIndexModel fit_string_index(const StringData& column);
Int64Data apply_string_index(const StringIndexModel& model, const StringData& column);

// Quantile binning with nearest-rank cut points at i/nbins, duplicates
// merged; bin(x) = number of cut points <= x.
struct QuantileBinModel {
    std::vector<double> cut_points;
};
QuantileBinModel fit_quantile_bins(std::span<const double> values, int nbins = 100);
std::int64_t bin_value(const QuantileBinModel& model, double v);

// Per-dataset categorisation models, persisted as a sidecar.
struct CategorisationModel {
    // feature -> categorised column name (x, x_binned, or x_indexed)
    std::map<std::string, std::string> column_names;
    std::map<std::string, StringIndexModel> string_indexers;
    std::map<std::string, QuantileBinModel> binners;
};

// Fits and applies categorisation to every feature column: strings are
// frequency-indexed; float columns and integer columns with more than 100
// distinct values are quantile-binned; everything else passes through.
// The output keeps keys and labels and emits int64 feature columns only.
std::pair<ColumnTable, CategorisationModel> categorise(const ColumnTable& final_table);
ColumnTable apply_categorisation(const CategorisationModel& model, const ColumnTable& final_table);

void save_categorisation(const CategorisationModel& model, const std::string& path);
CategorisationModel load_categorisation(const std::string& path);

// Chi-squared statistic of a categorical feature against a binary label.
// Throws when only one label class is observed.
double chi_square(std::span<const std::int64_t> feature, std::span<const std::int64_t> label);

struct ChiSqScore {
    std::string feature;  // registry feature name
    double statistic = 0.0;
};

// All (feature, target) scores on a categorised frame; deterministic order.
std::vector<ChiSqScore> chi_square_scores(const ColumnTable& categorised, const CategorisationModel& model,
                                          const std::string& target, bool include_oracle);

// Top-k by descending statistic; ties by ascending registry index.
// k may be 5/10/25/50 or the full feature count via k = -1 ("all").
std::vector<std::string> select_top_k(const std::vector<ChiSqScore>& scores, int k);

// Ordered feature lists per vector column "ev__{fs}__{note}__{target}__sdotd".
struct SelectionSet {
    std::map<std::string, std::vector<std::string>> vectors;
};

SelectionSet compute_selections(const ColumnTable& categorised_train, const CategorisationModel& model);
void save_selections(const SelectionSet& sel, const std::string& path);
SelectionSet load_selections(const std::string& path);

std::string vector_column_name(const std::string& fs, const std::string& note, const std::string& target);

// A categorised frame plus its selection registry; materializes dense
// feature matrices for the named vector columns on demand.
class FeatureFrame {
public:
    FeatureFrame(ColumnTable categorised, CategorisationModel model, SelectionSet selections);

    const ColumnTable& table() const { return table_; }
    const SelectionSet& selections() const { return selections_; }
    const CategorisationModel& model() const { return model_; }

    std::size_t row_count() const { return table_.row_count(); }

    // Row-major dense matrix for one vector column.
    struct Matrix {
        std::size_t rows = 0, cols = 0;
        std::vector<double> data;
        std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    };
    Matrix gather(const std::string& vector_column) const;
    // Same, from an explicit ordered feature list (cross-frame evaluation).
    Matrix gather_features(const std::vector<std::string>& features) const;

    std::vector<std::int64_t> labels(const std::string& target) const;

private:
    ColumnTable table_;
    CategorisationModel model_;
    SelectionSet selections_;
};

}  // namespace ctxengage
