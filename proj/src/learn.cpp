#include "ctxengage/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ctxengage/eval_metrics.hpp"
#include "ctxengage/kernels.hpp"
#include "ctxengage/prng.hpp"

namespace ctxengage {

namespace {

using nlohmann::json;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

constexpr double kNegInfLog = -1e30;

void check_binary(Labels y) {
    bool pos = false, neg = false;
    for (auto v : y) (v ? pos : neg) = true;
    if (!pos || !neg) throw std::runtime_error("training labels contain a single class");
}

// --- Generic exhaustive "feature <= v" split search ---------------------

struct SplitStats {
    double count = 0.0;
    double sum = 0.0;    // positives (classification) or residual sum (regression)
    double sum_sq = 0.0; // residual^2 (regression only)
    double hess = 0.0;   // sigma(F)(1-sigma(F)) (gbt leaves)
};

struct BestSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

double class_impurity(Impurity imp, double count, double pos) {
    if (count <= 0.0) return 0.0;
    double p = pos / count;
    if (imp == Impurity::Gini) return 1.0 - p * p - (1.0 - p) * (1.0 - p);
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return h;
}

double variance_impurity(double count, double sum, double sum_sq) {
    if (count <= 0.0) return 0.0;
    double mean = sum / count;
    return std::max(0.0, sum_sq / count - mean * mean);
}

template <typename ImpurityFn>
BestSplit find_best_split(const Matrix& X, const std::vector<std::uint32_t>& rows,
                          const std::vector<int>& features, const std::vector<SplitStats>& row_stats,
                          int min_instances, ImpurityFn node_impurity) {
    SplitStats total;
    for (auto r : rows) {
        total.count += row_stats[r].count;
        total.sum += row_stats[r].sum;
        total.sum_sq += row_stats[r].sum_sq;
    }
    const double parent = node_impurity(total);

    BestSplit best;
    for (int f : features) {
        // Aggregate per distinct value; std::map keeps thresholds ascending.
        std::map<double, SplitStats> by_value;
        for (auto r : rows) {
            auto& s = by_value[X.row(r)[static_cast<std::size_t>(f)]];
            s.count += row_stats[r].count;
            s.sum += row_stats[r].sum;
            s.sum_sq += row_stats[r].sum_sq;
        }
        if (by_value.size() < 2) continue;

        SplitStats left;
        std::size_t seen = 0;
        for (const auto& [value, stats] : by_value) {
            ++seen;
            if (seen == by_value.size()) break;  // right side would be empty
            left.count += stats.count;
            left.sum += stats.sum;
            left.sum_sq += stats.sum_sq;
            SplitStats right{total.count - left.count, total.sum - left.sum, total.sum_sq - left.sum_sq, 0.0};
            if (left.count < min_instances || right.count < min_instances) continue;
            double gain = parent - (left.count / total.count) * node_impurity(left) -
                          (right.count / total.count) * node_impurity(right);
            if (!best.found || gain > best.gain) {
                best.found = true;
                best.feature = f;
                best.threshold = value;
                best.gain = gain;
            }
        }
    }
    return best;
}

struct TreeBuildConfig {
    int max_depth = 5;
    int min_instances = 1;
    double min_gain = 0.0;
    // Classification when impurity is set; regression (variance) otherwise.
    std::optional<Impurity> impurity;
    // Per-node feature subsetting (forests); 0 or >= D means all features.
    int features_per_node = 0;
    std::mt19937_64* rng = nullptr;
};

// Builds one tree over `rows`. For regression trees the leaf value is the
// Newton step sum(residual)/sum(hessian).
TreeModel build_tree(const Matrix& X, const std::vector<SplitStats>& row_stats,
                     const std::vector<std::uint32_t>& rows, const TreeBuildConfig& cfg) {
    TreeModel tree;
    const int dims = static_cast<int>(X.cols);

    auto leaf_value = [&](const std::vector<std::uint32_t>& node_rows) {
        double count = 0.0, sum = 0.0, hess = 0.0;
        for (auto r : node_rows) {
            count += row_stats[r].count;
            sum += row_stats[r].sum;
            hess += row_stats[r].hess;
        }
        if (cfg.impurity) return count > 0.0 ? sum / count : 0.0;
        return hess > 1e-12 ? sum / hess : 0.0;
    };

    auto node_impurity = [&](const SplitStats& s) {
        if (cfg.impurity) return class_impurity(*cfg.impurity, s.count, s.sum);
        return variance_impurity(s.count, s.sum, s.sum_sq);
    };

    auto pick_features = [&]() {
        std::vector<int> all(dims);
        std::iota(all.begin(), all.end(), 0);
        if (cfg.features_per_node <= 0 || cfg.features_per_node >= dims || cfg.rng == nullptr) return all;
        // Partial Fisher-Yates, then sorted so tie-breaking stays by index.
        for (int i = 0; i < cfg.features_per_node; ++i) {
            int j = i + static_cast<int>((*cfg.rng)() % static_cast<std::uint64_t>(dims - i));
            std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
        }
        all.resize(static_cast<std::size_t>(cfg.features_per_node));
        std::sort(all.begin(), all.end());
        return all;
    };

    // Depth-first construction.
    auto build = [&](auto&& self, const std::vector<std::uint32_t>& node_rows, int depth) -> std::int32_t {
        const auto node_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<std::size_t>(node_id)].value = leaf_value(node_rows);

        bool pure = true;
        if (cfg.impurity) {
            double first = row_stats[node_rows.front()].sum;
            for (auto r : node_rows)
                if (row_stats[r].sum != first) {
                    pure = false;
                    break;
                }
        } else {
            SplitStats total;
            for (auto r : node_rows) {
                total.count += row_stats[r].count;
                total.sum += row_stats[r].sum;
                total.sum_sq += row_stats[r].sum_sq;
            }
            pure = variance_impurity(total.count, total.sum, total.sum_sq) < 1e-15;
        }
        if (pure || depth >= cfg.max_depth || node_rows.size() < 2 * static_cast<std::size_t>(cfg.min_instances))
            return node_id;

        BestSplit split = find_best_split(X, node_rows, pick_features(), row_stats, cfg.min_instances,
                                          node_impurity);
        if (!split.found || split.gain < cfg.min_gain) return node_id;

        std::vector<std::uint32_t> left_rows, right_rows;
        for (auto r : node_rows) {
            (X.row(r)[static_cast<std::size_t>(split.feature)] <= split.threshold ? left_rows : right_rows)
                .push_back(r);
        }
        std::int32_t left = self(self, left_rows, depth + 1);
        std::int32_t right = self(self, right_rows, depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(node_id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return node_id;
    };
    build(build, rows, 0);
    return tree;
}

std::vector<std::uint32_t> all_rows(std::size_t n) {
    std::vector<std::uint32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

}  // namespace

double TreeModel::predict_row(std::span<const double> x) const {
    std::size_t node = 0;
    while (nodes[node].feature >= 0) {
        node = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[node].feature)] <= nodes[node].threshold
                                            ? nodes[node].left
                                            : nodes[node].right);
    }
    return nodes[node].value;
}

std::vector<ParamMap> hyper_grid(const std::string& kind) {
    std::vector<ParamMap> cells;
    auto product = [&](const std::vector<std::pair<std::string, std::vector<double>>>& axes) {
        cells.push_back({});
        for (const auto& [name, values] : axes) {
            std::vector<ParamMap> next;
            for (const auto& cell : cells) {
                for (double v : values) {
                    ParamMap c = cell;
                    c[name] = v;
                    next.push_back(std::move(c));
                }
            }
            cells = std::move(next);
        }
    };
    if (kind == "lr") {
        product({{"elasticNetParam", {0.0, 0.5, 1.0}},
                 {"regParam", {0.0, 0.5, 1.0}},
                 {"fitIntercept", {1.0, 0.0}},
                 {"maxIter", {10.0, 50.0, 100.0}}});
    } else if (kind == "tree") {
        product({{"impurity", {0.0, 1.0}}, {"maxDepth", {5.0, 15.0, 30.0}}});
    } else if (kind == "forest") {
        product({{"impurity", {0.0, 1.0}},
                 {"numTrees", {10.0, 50.0, 100.0}},
                 {"featureSubsetStrategy", {0.0, 1.0, 2.0}}});
    } else if (kind == "GradientBoosting") {
        product({{"minInstancesPerNode", {1.0, 5.0, 10.0}},
                 {"subsamplingRate", {0.1, 0.5, 1.0}},
                 {"minInfoGain", {0.1, 0.5, 1.0}},
                 {"stepSize", {0.1, 0.5, 1.0}}});
    } else if (kind == "svc") {
        product({{"regParam", {0.0, 0.5, 1.0}},
                 {"threshold", {0.0, 0.5, 1.0}},
                 {"standardization", {1.0, 0.0}},
                 {"fitIntercept", {1.0, 0.0}}});
    } else if (kind == "bayes") {
        product({{"smoothing", {0.0, 0.5, 1.0}}});
    } else {
        throw std::runtime_error("unknown classifier kind: " + kind);
    }
    return cells;
}

NaiveBayesModel train_nb(const Matrix& X, Labels y, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw std::runtime_error("train_nb: smoothing outside [0,1]");
    check_binary(y);
    const std::size_t n = X.rows, d = X.cols;

    NaiveBayesModel m;
    m.alpha = alpha;
    double class_rows[2] = {0.0, 0.0};
    std::vector<std::vector<double>> feature_sum(2, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        int c = y[i] ? 1 : 0;
        class_rows[c] += 1.0;
        auto row = X.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            if (row[j] < 0.0) throw std::runtime_error("train_nb: negative feature value");
            feature_sum[static_cast<std::size_t>(c)][j] += row[j];
        }
    }

    m.log_prior.resize(2);
    m.log_theta.assign(2, std::vector<double>(d, 0.0));
    for (int c = 0; c < 2; ++c) {
        m.log_prior[static_cast<std::size_t>(c)] = std::log(class_rows[c] / static_cast<double>(n));
        double total = std::accumulate(feature_sum[static_cast<std::size_t>(c)].begin(),
                                       feature_sum[static_cast<std::size_t>(c)].end(), 0.0) +
                       alpha * static_cast<double>(d);
        for (std::size_t j = 0; j < d; ++j) {
            double theta = total > 0.0 ? (feature_sum[static_cast<std::size_t>(c)][j] + alpha) / total : 0.0;
            m.log_theta[static_cast<std::size_t>(c)][j] = theta > 0.0 ? std::log(theta) : kNegInfLog;
        }
    }
    return m;
}

LinearModel train_lr(const Matrix& X, Labels y, const LrParams& params) {
    const std::size_t n = X.rows, d = X.cols;
    LinearModel m;
    m.weights.assign(d, 0.0);
    m.fit_intercept = params.fit_intercept;
    constexpr double kRate = 0.1;

    std::vector<double> grad(d);
    for (int it = 0; it < params.max_iter; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = X.row(i);
            double z = kernels::dot(row, m.weights) + (m.fit_intercept ? m.intercept : 0.0);
            double err = sigmoid(z) - static_cast<double>(y[i]);
            kernels::axpy(err, row, grad);
            grad_b += err;
        }
        double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) {
            double g = grad[j] * inv_n;
            if (params.reg_param > 0.0) {
                double w = m.weights[j];
                double l1 = w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
                g += params.reg_param * (params.elastic_net * l1 + (1.0 - params.elastic_net) * w);
            }
            m.weights[j] -= kRate * g;
            if (!std::isfinite(m.weights[j])) throw std::runtime_error("train_lr: non-finite weights");
        }
        if (m.fit_intercept) m.intercept -= kRate * grad_b * inv_n;
    }
    return m;
}

TreeModel train_tree(const Matrix& X, Labels y, const TreeParams& params) {
    if (X.rows == 0) throw std::runtime_error("train_tree: empty input");
    std::vector<SplitStats> row_stats(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) row_stats[i] = {1.0, static_cast<double>(y[i] ? 1 : 0), 0.0, 0.0};
    TreeBuildConfig cfg;
    cfg.max_depth = params.max_depth;
    cfg.min_instances = params.min_instances_per_node;
    cfg.min_gain = params.min_info_gain;
    cfg.impurity = params.impurity;
    return build_tree(X, row_stats, all_rows(X.rows), cfg);
}

ForestModel train_forest(const Matrix& X, Labels y, const ForestParams& params, std::uint64_t seed,
                         bool bootstrap) {
    if (params.num_trees < 1) throw std::runtime_error("train_forest: numTrees must be >= 1");
    const int dims = static_cast<int>(X.cols);
    int features_per_node = dims;
    if (params.feature_subset_strategy == 0)
        features_per_node = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(2, dims)))));
    else if (params.feature_subset_strategy == 1)
        features_per_node = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dims)))));

    std::vector<SplitStats> row_stats(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) row_stats[i] = {1.0, static_cast<double>(y[i] ? 1 : 0), 0.0, 0.0};

    ForestModel forest;
    for (int t = 0; t < params.num_trees; ++t) {
        // Per-tree stream, so parallel training order can never matter.
        auto rng = make_rng(seed, "forest_tree_" + std::to_string(t));
        std::vector<std::uint32_t> rows;
        if (bootstrap) {
            rows.resize(X.rows);
            for (auto& r : rows) r = static_cast<std::uint32_t>(rng() % X.rows);
            std::sort(rows.begin(), rows.end());
        } else {
            rows = all_rows(X.rows);
        }
        TreeBuildConfig cfg;
        cfg.max_depth = params.max_depth;
        cfg.impurity = params.impurity;
        cfg.features_per_node = features_per_node;
        cfg.rng = &rng;
        forest.trees.push_back(build_tree(X, row_stats, rows, cfg));
    }
    return forest;
}

GbtModel train_gbt(const Matrix& X, Labels y, const GbtParams& params, std::uint64_t seed) {
    check_binary(y);
    const std::size_t n = X.rows;
    double positives = 0.0;
    for (auto v : y) positives += (v != 0);
    const double pi = positives / static_cast<double>(n);

    GbtModel m;
    m.base_score = std::log(pi / (1.0 - pi));
    std::vector<double> f(n, m.base_score);
    std::vector<SplitStats> row_stats(n);

    for (int it = 0; it < params.num_iter; ++it) {
        std::vector<std::uint32_t> rows = all_rows(n);
        if (params.subsampling_rate < 1.0) {
            auto rng = make_rng(seed, "gbt_iter_" + std::to_string(it));
            deterministic_shuffle(rows, rng);
            rows.resize(std::max<std::size_t>(1, static_cast<std::size_t>(params.subsampling_rate *
                                                                          static_cast<double>(n))));
            std::sort(rows.begin(), rows.end());
        }
        for (auto r : rows) {
            double p = sigmoid(f[r]);
            row_stats[r] = {1.0, static_cast<double>(y[r] ? 1 : 0) - p, 0.0, p * (1.0 - p)};
            row_stats[r].sum_sq = row_stats[r].sum * row_stats[r].sum;
        }
        TreeBuildConfig cfg;
        cfg.max_depth = params.max_depth;
        cfg.min_instances = params.min_instances_per_node;
        cfg.min_gain = params.min_info_gain;
        TreeModel tree = build_tree(X, row_stats, rows, cfg);
        // Shrinkage folded into the stored leaf values.
        for (auto& node : tree.nodes)
            if (node.feature < 0) node.value *= params.step_size;
        for (std::size_t i = 0; i < n; ++i) f[i] += tree.predict_row(X.row(i));
        m.trees.push_back(std::move(tree));
    }
    return m;
}

SvcModel train_svc(const Matrix& X, Labels y, const SvcParams& params) {
    const std::size_t n = X.rows, d = X.cols;
    SvcModel m;
    m.threshold = params.threshold;
    m.standardized = params.standardization;
    m.weights.assign(d, 0.0);

    std::vector<double> data;
    const double* base = X.data.data();
    if (params.standardization) {
        m.mean.assign(d, 0.0);
        m.scale.assign(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = X.row(i);
            for (std::size_t j = 0; j < d; ++j) m.mean[j] += row[j];
        }
        for (auto& v : m.mean) v /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = X.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                double c = row[j] - m.mean[j];
                m.scale[j] += c * c;
            }
        }
        for (auto& v : m.scale) {
            v = std::sqrt(v / static_cast<double>(n));
            if (v <= 0.0) v = 1.0;  // zero-variance feature
        }
        data.resize(n * d);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) data[i * d + j] = (base[i * d + j] - m.mean[j]) / m.scale[j];
        }
        base = data.data();
    }

    std::vector<double> grad(d);
    for (int t = 0; t < params.num_iter; ++t) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::span<const double> row(base + i * d, d);
            double label = y[i] ? 1.0 : -1.0;
            double margin = kernels::dot(row, m.weights) + (params.fit_intercept ? m.intercept : 0.0);
            if (label * margin < 1.0) {
                kernels::axpy(-label, row, grad);
                grad_b -= label;
            }
        }
        double inv_n = 1.0 / static_cast<double>(n);
        double rate = 0.1 / (1.0 + 0.01 * static_cast<double>(t));
        for (std::size_t j = 0; j < d; ++j)
            m.weights[j] -= rate * (params.reg_param * m.weights[j] + grad[j] * inv_n);
        if (params.fit_intercept) m.intercept -= rate * grad_b * inv_n;
    }
    return m;
}

namespace {

std::vector<double> predict_nb(const NaiveBayesModel& m, const Matrix& X) {
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        auto row = X.row(i);
        double score[2];
        for (int c = 0; c < 2; ++c) {
            double s = m.log_prior[static_cast<std::size_t>(c)];
            const auto& theta = m.log_theta[static_cast<std::size_t>(c)];
            for (std::size_t j = 0; j < X.cols; ++j) {
                if (row[j] != 0.0) s += row[j] * theta[j];
            }
            score[c] = s;
        }
        if (score[0] <= kNegInfLog && score[1] <= kNegInfLog) {
            out[i] = std::exp(m.log_prior[1]);
        } else {
            out[i] = 1.0 / (1.0 + std::exp(score[0] - score[1]));
        }
    }
    return out;
}

}  // namespace

std::vector<double> ClassifierModel::predict_proba(const Matrix& X) const {
    std::vector<double> out(X.rows);
    if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) {
        out = predict_nb(*nb, X);
    } else if (const auto* lin = std::get_if<LinearModel>(&model)) {
        for (std::size_t i = 0; i < X.rows; ++i)
            out[i] = sigmoid(kernels::dot(X.row(i), lin->weights) + (lin->fit_intercept ? lin->intercept : 0.0));
    } else if (const auto* tree = std::get_if<TreeModel>(&model)) {
        for (std::size_t i = 0; i < X.rows; ++i) out[i] = tree->predict_row(X.row(i));
    } else if (const auto* forest = std::get_if<ForestModel>(&model)) {
        for (std::size_t i = 0; i < X.rows; ++i) {
            double acc = 0.0;
            for (const auto& tree : forest->trees) acc += tree.predict_row(X.row(i));
            out[i] = acc / static_cast<double>(forest->trees.size());
        }
    } else if (const auto* gbt = std::get_if<GbtModel>(&model)) {
        for (std::size_t i = 0; i < X.rows; ++i) {
            double f = gbt->base_score;
            for (const auto& tree : gbt->trees) f += tree.predict_row(X.row(i));
            out[i] = sigmoid(f);
        }
    } else if (const auto* svc = std::get_if<SvcModel>(&model)) {
        for (std::size_t i = 0; i < X.rows; ++i) {
            double margin;
            if (svc->standardized) {
                auto row = X.row(i);
                margin = svc->intercept;
                for (std::size_t j = 0; j < X.cols; ++j)
                    margin += svc->weights[j] * (row[j] - svc->mean[j]) / svc->scale[j];
            } else {
                margin = kernels::dot(X.row(i), svc->weights) + svc->intercept;
            }
            out[i] = sigmoid(margin);
        }
    }
    return out;
}

ClassifierModel train_classifier(const std::string& kind, const ParamMap& params, const Matrix& X, Labels y,
                                 std::uint64_t seed) {
    auto get = [&](const std::string& name, double fallback) {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    };
    ClassifierModel out;
    out.kind = kind;
    out.params = params;
    if (kind == "bayes") {
        out.model = train_nb(X, y, get("smoothing", 1.0));
    } else if (kind == "lr") {
        LrParams p;
        p.elastic_net = get("elasticNetParam", 0.0);
        p.reg_param = get("regParam", 0.0);
        p.fit_intercept = get("fitIntercept", 1.0) != 0.0;
        p.max_iter = static_cast<int>(get("maxIter", 100.0));
        out.model = train_lr(X, y, p);
    } else if (kind == "tree") {
        TreeParams p;
        p.impurity = get("impurity", 0.0) != 0.0 ? Impurity::Entropy : Impurity::Gini;
        p.max_depth = static_cast<int>(get("maxDepth", 5.0));
        out.model = train_tree(X, y, p);
    } else if (kind == "forest") {
        ForestParams p;
        p.impurity = get("impurity", 0.0) != 0.0 ? Impurity::Entropy : Impurity::Gini;
        p.num_trees = static_cast<int>(get("numTrees", 10.0));
        p.feature_subset_strategy = static_cast<int>(get("featureSubsetStrategy", 2.0));
        out.model = train_forest(X, y, p, seed);
    } else if (kind == "GradientBoosting") {
        GbtParams p;
        p.min_instances_per_node = static_cast<int>(get("minInstancesPerNode", 1.0));
        p.subsampling_rate = get("subsamplingRate", 1.0);
        p.min_info_gain = get("minInfoGain", 0.0);
        p.step_size = get("stepSize", 0.1);
        out.model = train_gbt(X, y, p, seed);
    } else if (kind == "svc") {
        SvcParams p;
        p.reg_param = get("regParam", 0.0);
        p.threshold = get("threshold", 0.0);
        p.standardization = get("standardization", 1.0) != 0.0;
        p.fit_intercept = get("fitIntercept", 1.0) != 0.0;
        out.model = train_svc(X, y, p);
    } else {
        throw std::runtime_error("unknown classifier kind: " + kind);
    }
    return out;
}

CrossValidationResult cross_validate(const Matrix& X, Labels y, const std::string& kind, std::uint64_t seed,
                                     int folds) {
    const std::size_t n = X.rows;
    if (n < static_cast<std::size_t>(folds)) throw std::runtime_error("cross_validate: too few rows");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(seed, "cross_validate");
    deterministic_shuffle(order, rng);

    struct Fold {
        Matrix train_x, eval_x;
        std::vector<std::int64_t> train_y;
        std::vector<std::uint8_t> eval_y;
        bool degenerate = false;
    };
    std::vector<Fold> fold_data(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        std::size_t lo = n * static_cast<std::size_t>(f) / static_cast<std::size_t>(folds);
        std::size_t hi = n * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(folds);
        auto& fold = fold_data[static_cast<std::size_t>(f)];
        fold.train_x.cols = fold.eval_x.cols = X.cols;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = X.row(order[i]);
            if (i >= lo && i < hi) {
                fold.eval_x.data.insert(fold.eval_x.data.end(), row.begin(), row.end());
                fold.eval_y.push_back(y[order[i]] ? 1 : 0);
            } else {
                fold.train_x.data.insert(fold.train_x.data.end(), row.begin(), row.end());
                fold.train_y.push_back(y[order[i]]);
            }
        }
        fold.train_x.rows = fold.train_y.size();
        fold.eval_x.rows = fold.eval_y.size();
        auto single_class = [](auto span_like) {
            bool pos = false, neg = false;
            for (auto v : span_like) (v ? pos : neg) = true;
            return !(pos && neg);
        };
        fold.degenerate = single_class(fold.eval_y) || single_class(fold.train_y);
    }

    CrossValidationResult out;
    double best = -std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (const auto& cell : hyper_grid(kind)) {
        double score;
        bool degenerate = false;
        for (const auto& fold : fold_data) degenerate = degenerate || fold.degenerate;
        if (degenerate) {
            score = -std::numeric_limits<double>::infinity();
            ++out.degenerate_folds;
        } else {
            double total = 0.0;
            for (const auto& fold : fold_data) {
                ClassifierModel model = train_classifier(kind, cell, fold.train_x, fold.train_y, seed);
                auto preds = model.predict_proba(fold.eval_x);
                total += rce(fold.eval_y, preds);
            }
            score = total / static_cast<double>(folds);
        }
        out.cell_scores.emplace_back(cell, score);
        if (!have_best || score > best) {
            have_best = true;
            best = score;
            out.best_params = cell;
            out.best_mean_rce = score;
        }
    }
    return out;
}

double mean_log_loss(Labels y, std::span<const double> preds) {
    std::vector<std::uint8_t> labels(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) labels[i] = y[i] ? 1 : 0;
    return cross_entropy(labels, preds);
}

// --- Serialization -------------------------------------------------------

namespace {

json tree_to_json(const TreeModel& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return nodes;
}

TreeModel tree_from_json(const json& j) {
    TreeModel t;
    for (const auto& n : j)
        t.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<std::int32_t>(),
                           n.at(3).get<std::int32_t>(), n.at(4).get<double>()});
    return t;
}

}  // namespace

std::string ClassifierModel::to_json() const {
    json j;
    j["kind"] = kind;
    j["params"] = params;
    if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) {
        j["model"] = {{"alpha", nb->alpha}, {"log_prior", nb->log_prior}, {"log_theta", nb->log_theta}};
    } else if (const auto* lin = std::get_if<LinearModel>(&model)) {
        j["model"] = {{"weights", lin->weights},
                      {"intercept", lin->intercept},
                      {"fit_intercept", lin->fit_intercept}};
    } else if (const auto* tree = std::get_if<TreeModel>(&model)) {
        j["model"] = {{"nodes", tree_to_json(*tree)}};
    } else if (const auto* forest = std::get_if<ForestModel>(&model)) {
        json trees = json::array();
        for (const auto& t : forest->trees) trees.push_back(tree_to_json(t));
        j["model"] = {{"trees", trees}};
    } else if (const auto* gbt = std::get_if<GbtModel>(&model)) {
        json trees = json::array();
        for (const auto& t : gbt->trees) trees.push_back(tree_to_json(t));
        j["model"] = {{"base_score", gbt->base_score}, {"trees", trees}};
    } else if (const auto* svc = std::get_if<SvcModel>(&model)) {
        j["model"] = {{"weights", svc->weights}, {"intercept", svc->intercept},
                      {"threshold", svc->threshold}, {"standardized", svc->standardized},
                      {"mean", svc->mean},          {"scale", svc->scale}};
    }
    return j.dump(1);
}

ClassifierModel ClassifierModel::from_json(const std::string& text) {
    json j = json::parse(text);
    ClassifierModel out;
    out.kind = j.at("kind").get<std::string>();
    out.params = j.at("params").get<ParamMap>();
    const json& m = j.at("model");
    if (out.kind == "bayes") {
        NaiveBayesModel nb;
        nb.alpha = m.at("alpha").get<double>();
        nb.log_prior = m.at("log_prior").get<std::vector<double>>();
        nb.log_theta = m.at("log_theta").get<std::vector<std::vector<double>>>();
        out.model = std::move(nb);
    } else if (out.kind == "lr") {
        LinearModel lin;
        lin.weights = m.at("weights").get<std::vector<double>>();
        lin.intercept = m.at("intercept").get<double>();
        lin.fit_intercept = m.at("fit_intercept").get<bool>();
        out.model = std::move(lin);
    } else if (out.kind == "tree") {
        out.model = tree_from_json(m.at("nodes"));
    } else if (out.kind == "forest") {
        ForestModel forest;
        for (const auto& t : m.at("trees")) forest.trees.push_back(tree_from_json(t));
        out.model = std::move(forest);
    } else if (out.kind == "GradientBoosting") {
        GbtModel gbt;
        gbt.base_score = m.at("base_score").get<double>();
        for (const auto& t : m.at("trees")) gbt.trees.push_back(tree_from_json(t));
        out.model = std::move(gbt);
    } else if (out.kind == "svc") {
        SvcModel svc;
        svc.weights = m.at("weights").get<std::vector<double>>();
        svc.intercept = m.at("intercept").get<double>();
        svc.threshold = m.at("threshold").get<double>();
        svc.standardized = m.at("standardized").get<bool>();
        svc.mean = m.at("mean").get<std::vector<double>>();
        svc.scale = m.at("scale").get<std::vector<double>>();
        out.model = std::move(svc);
    } else {
        throw std::runtime_error("unknown classifier kind in model file: " + out.kind);
    }
    return out;
}

}  // namespace ctxengage
