#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ctxengage/select.hpp"

namespace ctxengage {

using Matrix = FeatureFrame::Matrix;
using Labels = std::span<const std::int64_t>;

// Grid cells are flat name -> value maps; enum-valued parameters are coded
// (impurity: 0 = gini, 1 = entropy; featureSubsetStrategy: 0 = log2,
// 1 = sqrt, 2 = all; booleans as 0/1).
using ParamMap = std::map<std::string, double>;

inline const std::vector<std::string> kClassifierKinds = {"bayes", "lr",  "tree",
                                                          "forest", "GradientBoosting", "svc"};

// The fixed hyperparameter grid for one classifier kind, cells in the
// documented iteration order (parameters nested in listed order, the last
// one varying fastest).
std::vector<ParamMap> hyper_grid(const std::string& kind);

// --- Models -------------------------------------------------------------

struct NaiveBayesModel {
    double alpha = 1.0;
    std::vector<double> log_prior;               // per class {0,1}
    std::vector<std::vector<double>> log_theta;  // [class][feature]
};

struct LinearModel {
    std::vector<double> weights;
    double intercept = 0.0;
    bool fit_intercept = true;
};

struct TreeNode {
    // feature < 0 marks a leaf.
    int feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;  // leaf probability (classification) or additive value (regression)
};

struct TreeModel {
    std::vector<TreeNode> nodes;
    double predict_row(std::span<const double> x) const;
};

struct ForestModel {
    std::vector<TreeModel> trees;
};

struct GbtModel {
    double base_score = 0.0;  // ln(pi / (1 - pi))
    std::vector<TreeModel> trees;  // leaf values already scaled by stepSize
};

struct SvcModel {
    std::vector<double> weights;
    double intercept = 0.0;
    double threshold = 0.0;
    bool standardized = false;
    std::vector<double> mean, scale;
};

struct ClassifierModel {
    std::string kind;
    ParamMap params;
    std::variant<NaiveBayesModel, LinearModel, TreeModel, ForestModel, GbtModel, SvcModel> model;

    std::vector<double> predict_proba(const Matrix& X) const;

    std::string to_json() const;
    static ClassifierModel from_json(const std::string& text);
};

// --- Trainers -----------------------------------------------------------

// Multinomial naive Bayes with additive smoothing; X entries must be >= 0,
// alpha in [0,1], both classes present.
NaiveBayesModel train_nb(const Matrix& X, Labels y, double alpha);

struct LrParams {
    double elastic_net = 0.0;  // 1 = L1, 0 = L2
    double reg_param = 0.0;
    bool fit_intercept = true;
    int max_iter = 100;
};
// Full-batch gradient descent, learning rate 0.1, weights initialized to 0,
// exactly max_iter steps.
LinearModel train_lr(const Matrix& X, Labels y, const LrParams& params);

enum class Impurity { Gini, Entropy };

struct TreeParams {
    Impurity impurity = Impurity::Gini;
    int max_depth = 5;
    int min_instances_per_node = 1;
    double min_info_gain = 0.0;
};
// Recursive binary "feature <= v" splits maximizing impurity decrease
// (natural-log entropy or Gini); gain ties go to the lowest feature index,
// then the smallest threshold. Leaf value = positive fraction.
TreeModel train_tree(const Matrix& X, Labels y, const TreeParams& params);

struct ForestParams {
    Impurity impurity = Impurity::Gini;
    int num_trees = 10;
    int feature_subset_strategy = 2;  // 0 log2, 1 sqrt, 2 all
    int max_depth = 5;
};
// With-replacement bootstraps of size n; per-node random feature subsets;
// probability = mean of tree probabilities. `bootstrap` is a test hook.
ForestModel train_forest(const Matrix& X, Labels y, const ForestParams& params, std::uint64_t seed,
                         bool bootstrap = true);

struct GbtParams {
    int min_instances_per_node = 1;
    double subsampling_rate = 1.0;
    double min_info_gain = 0.0;  // minimum variance reduction
    double step_size = 0.1;
    int num_iter = 20;
    int max_depth = 5;
};
// Logistic-loss boosting: F0 = ln(pi/(1-pi)); per iteration a depth-bounded
// regression tree is fit to residuals y - sigmoid(F) on a row subsample and
// each leaf takes a single Newton step (sum r / sum p(1-p)).
GbtModel train_gbt(const Matrix& X, Labels y, const GbtParams& params, std::uint64_t seed);

struct SvcParams {
    double reg_param = 0.0;
    double threshold = 0.0;
    bool standardization = true;
    bool fit_intercept = true;
    int num_iter = 100;
};
// Linear SVM by deterministic subgradient descent with rate 0.1/(1+0.01 t);
// sigma(margin) serves as the probability surrogate for metric computation.
SvcModel train_svc(const Matrix& X, Labels y, const SvcParams& params);

// Dispatch on kind with a ParamMap grid cell.
ClassifierModel train_classifier(const std::string& kind, const ParamMap& params, const Matrix& X, Labels y,
                                 std::uint64_t seed);

// --- Tuning -------------------------------------------------------------

struct CrossValidationResult {
    ParamMap best_params;
    double best_mean_rce = 0.0;
    std::vector<std::pair<ParamMap, double>> cell_scores;  // grid order
    int degenerate_folds = 0;  // folds skipped for having a single class
};

// Deterministic shuffled contiguous k-fold split; the mean held-out RCE
// picks the winning cell, ties resolved by grid order.
CrossValidationResult cross_validate(const Matrix& X, Labels y, const std::string& kind, std::uint64_t seed,
                                     int folds = 4);

// Loss helpers shared by trainers and tests.
double mean_log_loss(Labels y, std::span<const double> preds);

}  // namespace ctxengage
