#include "ctxengage/select.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ctxengage/registry.hpp"

namespace ctxengage {

namespace {

using nlohmann::json;

constexpr int kMaxDistinctPassthrough = 100;

}  // namespace

StringIndexModel fit_string_index(const StringData& column) {
    std::map<std::string, std::int64_t> freq;
    for (const auto& v : column) ++freq[v];
    std::vector<std::pair<std::string, std::int64_t>> order(freq.begin(), freq.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    StringIndexModel model;
    for (std::size_t i = 0; i < order.size(); ++i) {
        model.values.push_back(order[i].first);
        model.codes[order[i].first] = static_cast<std::int64_t>(i);
    }
    return model;
}

Int64Data apply_string_index(const StringIndexModel& model, const StringData& column) {
    Int64Data out;
    out.values.resize(column.size());
    for (std::size_t i = 0; i < column.size(); ++i) {
        auto it = model.codes.find(column[i]);
        // Unseen values map past the known codes.
        out.values[i] = it == model.codes.end() ? static_cast<std::int64_t>(model.values.size()) : it->second;
    }
    return out;
}

QuantileBinModel fit_quantile_bins(std::span<const double> values, int nbins) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    QuantileBinModel model;
    if (sorted.empty()) return model;
    const std::size_t n = sorted.size();
    for (int i = 1; i < nbins; ++i) {
        // Nearest-rank quantile at q = i/nbins.
        std::size_t rank = static_cast<std::size_t>(
            std::ceil(static_cast<double>(i) / static_cast<double>(nbins) * static_cast<double>(n)));
        if (rank == 0) rank = 1;
        double cut = sorted[rank - 1];
        if (model.cut_points.empty() || cut > model.cut_points.back()) model.cut_points.push_back(cut);
    }
    // A cut at the maximum adds no information (everything is <= it on one side).
    while (!model.cut_points.empty() && model.cut_points.back() >= sorted.back()) model.cut_points.pop_back();
    return model;
}

std::int64_t bin_value(const QuantileBinModel& model, double v) {
    return std::upper_bound(model.cut_points.begin(), model.cut_points.end(), v) - model.cut_points.begin();
}

namespace {

Column categorise_column(const Column& col, const std::string& feature, CategorisationModel& model,
                         bool fit) {
    switch (col.type()) {
        case ColumnType::String: {
            if (fit) {
                model.string_indexers[feature] = fit_string_index(col.strings());
                model.column_names[feature] = feature + "_indexed";
            }
            return Column(apply_string_index(model.string_indexers.at(feature), col.strings()));
        }
        case ColumnType::Bool: {
            if (fit) model.column_names[feature] = feature;
            Int64Data out;
            out.values.reserve(col.size());
            for (auto b : col.bools()) out.values.push_back(b ? 1 : 0);
            return Column(std::move(out));
        }
        case ColumnType::Int64: {
            const auto& values = col.i64().values;
            bool bin;
            if (fit) {
                std::set<std::int64_t> distinct(values.begin(), values.end());
                bin = distinct.size() > kMaxDistinctPassthrough;
                model.column_names[feature] = bin ? feature + "_binned" : feature;
                if (bin) {
                    std::vector<double> as_double(values.begin(), values.end());
                    model.binners[feature] = fit_quantile_bins(as_double);
                }
            } else {
                bin = model.binners.count(feature) != 0;
            }
            if (!bin) return Column(Int64Data{values, {}});
            const auto& binner = model.binners.at(feature);
            Int64Data out;
            out.values.reserve(values.size());
            for (auto v : values) out.values.push_back(bin_value(binner, static_cast<double>(v)));
            return Column(std::move(out));
        }
        case ColumnType::Float64: {
            // Continuous features are always binned.
            if (fit) {
                model.column_names[feature] = feature + "_binned";
                model.binners[feature] = fit_quantile_bins(col.f64());
            }
            const auto& binner = model.binners.at(feature);
            Int64Data out;
            out.values.reserve(col.size());
            for (auto v : col.f64()) out.values.push_back(bin_value(binner, v));
            return Column(std::move(out));
        }
        case ColumnType::StringSet: break;
    }
    throw std::runtime_error("cannot categorise column " + feature);
}

ColumnTable categorise_impl(const ColumnTable& final_table, CategorisationModel& model, bool fit) {
    std::vector<std::pair<std::string, Column>> cols;
    for (const auto& k : key_columns()) cols.emplace_back(k, final_table.column(k));
    for (const auto& l : label_columns()) cols.emplace_back(l, final_table.column(l));
    for (const auto& f : relevant_features()) {
        Column c = categorise_column(final_table.column(f), f, model, fit);
        cols.emplace_back(model.column_names.at(f), std::move(c));
    }
    for (const auto& f : oracle_features()) {
        Column c = categorise_column(final_table.column(f), f, model, fit);
        cols.emplace_back(model.column_names.at(f), std::move(c));
    }
    return ColumnTable::from_columns(std::move(cols));
}

}  // namespace

std::pair<ColumnTable, CategorisationModel> categorise(const ColumnTable& final_table) {
    CategorisationModel model;
    ColumnTable out = categorise_impl(final_table, model, true);
    return {std::move(out), std::move(model)};
}

ColumnTable apply_categorisation(const CategorisationModel& model, const ColumnTable& final_table) {
    CategorisationModel copy = model;
    return categorise_impl(final_table, copy, false);
}

void save_categorisation(const CategorisationModel& model, const std::string& path) {
    json j;
    j["column_names"] = model.column_names;
    json idx = json::object();
    for (const auto& [feature, m] : model.string_indexers) idx[feature] = m.values;
    j["string_indexers"] = idx;
    json bins = json::object();
    for (const auto& [feature, m] : model.binners) bins[feature] = m.cut_points;
    j["binners"] = bins;
    std::ofstream out(path + ".tmp", std::ios::trunc);
    out << j.dump(1) << '\n';
    out.close();
    std::filesystem::rename(path + ".tmp", path);
}

CategorisationModel load_categorisation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing categorisation model: " + path);
    json j = json::parse(in);
    CategorisationModel model;
    model.column_names = j.at("column_names").get<std::map<std::string, std::string>>();
    for (const auto& [feature, values] : j.at("string_indexers").items()) {
        StringIndexModel m;
        m.values = values.get<std::vector<std::string>>();
        for (std::size_t i = 0; i < m.values.size(); ++i) m.codes[m.values[i]] = static_cast<std::int64_t>(i);
        model.string_indexers[feature] = std::move(m);
    }
    for (const auto& [feature, cuts] : j.at("binners").items()) {
        QuantileBinModel m;
        m.cut_points = cuts.get<std::vector<double>>();
        model.binners[feature] = std::move(m);
    }
    return model;
}

double chi_square(std::span<const std::int64_t> feature, std::span<const std::int64_t> label) {
    if (feature.empty() || feature.size() != label.size()) throw std::runtime_error("chi_square: bad input sizes");
    const double n = static_cast<double>(feature.size());

    std::unordered_map<std::int64_t, std::array<double, 2>> table;  // category -> per-class counts
    double class_count[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < feature.size(); ++i) {
        int c = label[i] ? 1 : 0;
        table[feature[i]][static_cast<std::size_t>(c)] += 1.0;
        class_count[c] += 1.0;
    }
    if (class_count[0] == 0.0 || class_count[1] == 0.0)
        throw std::runtime_error("chi_square: a single observed class");

    double stat = 0.0;
    for (const auto& [category, observed] : table) {
        const double category_total = observed[0] + observed[1];
        for (int c = 0; c < 2; ++c) {
            const double expected = category_total * class_count[c] / n;
            const double diff = observed[static_cast<std::size_t>(c)] - expected;
            stat += diff * diff / expected;
        }
    }
    return stat;
}

std::vector<ChiSqScore> chi_square_scores(const ColumnTable& categorised, const CategorisationModel& model,
                                          const std::string& target, bool include_oracle) {
    auto labels = categorised.i64(target);
    std::vector<ChiSqScore> scores;
    auto add = [&](const std::string& feature) {
        const auto& col = categorised.i64(model.column_names.at(feature));
        scores.push_back({feature, chi_square(col, labels)});
    };
    for (const auto& f : relevant_features()) add(f);
    if (include_oracle)
        for (const auto& f : oracle_features()) add(f);
    return scores;
}

std::vector<std::string> select_top_k(const std::vector<ChiSqScore>& scores, int k) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a].statistic != scores[b].statistic) return scores[a].statistic > scores[b].statistic;
        return registry_index(scores[a].feature) < registry_index(scores[b].feature);
    });
    std::size_t keep = k < 0 ? scores.size() : static_cast<std::size_t>(k);
    if (keep > scores.size()) throw std::runtime_error("select_top_k: k exceeds available features");
    std::vector<std::string> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back(scores[order[i]].feature);
    return out;
}

std::string vector_column_name(const std::string& fs, const std::string& note, const std::string& target) {
    return "ev__" + fs + "__" + note + "__" + target + "__sdotd";
}

SelectionSet compute_selections(const ColumnTable& categorised_train, const CategorisationModel& model) {
    SelectionSet out;
    const std::vector<std::pair<std::string, int>> limits = {
        {"top_5", 5}, {"top_10", 10}, {"top_25", 25}, {"top_50", 50}, {"all", -1}};
    for (const char* note : {"scaled", "oracle_scaled"}) {
        const bool oracle = note == std::string("oracle_scaled");
        for (const auto& target : kEngagements) {
            auto scores = chi_square_scores(categorised_train, model, target, oracle);
            for (const auto& [fs, k] : limits) {
                std::vector<std::string> features;
                if (fs == "all") {
                    // All relevant features in registry order.
                    features.assign(relevant_features().begin(), relevant_features().end());
                    if (oracle)
                        features.insert(features.end(), oracle_features().begin(), oracle_features().end());
                } else {
                    features = select_top_k(scores, k);
                }
                out.vectors[vector_column_name(fs, note, target)] = std::move(features);
            }
        }
    }
    return out;
}

void save_selections(const SelectionSet& sel, const std::string& path) {
    json j = json::object();
    for (const auto& [name, features] : sel.vectors) j[name] = features;
    std::ofstream out(path + ".tmp", std::ios::trunc);
    out << j.dump(1) << '\n';
    out.close();
    std::filesystem::rename(path + ".tmp", path);
}

SelectionSet load_selections(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing selections file: " + path);
    json j = json::parse(in);
    SelectionSet out;
    for (const auto& [name, features] : j.items()) out.vectors[name] = features.get<std::vector<std::string>>();
    return out;
}

FeatureFrame::FeatureFrame(ColumnTable categorised, CategorisationModel model, SelectionSet selections)
    : table_(std::move(categorised)), model_(std::move(model)), selections_(std::move(selections)) {}

FeatureFrame::Matrix FeatureFrame::gather(const std::string& vector_column) const {
    auto it = selections_.vectors.find(vector_column);
    if (it == selections_.vectors.end()) throw std::runtime_error("unknown vector column: " + vector_column);
    return gather_features(it->second);
}

FeatureFrame::Matrix FeatureFrame::gather_features(const std::vector<std::string>& features) const {
    Matrix m;
    m.rows = table_.row_count();
    m.cols = features.size();
    m.data.assign(m.rows * m.cols, 0.0);
    for (std::size_t c = 0; c < features.size(); ++c) {
        const auto& col = table_.i64(model_.column_names.at(features[c]));
        for (std::size_t r = 0; r < m.rows; ++r) m.data[r * m.cols + c] = static_cast<double>(col[r]);
    }
    return m;
}

std::vector<std::int64_t> FeatureFrame::labels(const std::string& target) const {
    auto span = table_.i64(target);
    return {span.begin(), span.end()};
}

}  // namespace ctxengage
