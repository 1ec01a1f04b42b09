#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ctxengage {

// One evaluated (model, dataset, target) combination with both metrics.
struct EvalRecord {
    std::string algorithm;
    std::string note;               // scaled | oracle_scaled
    std::string feature_selection;  // all | top_5 | top_10 | top_25 | top_50
    std::string to_technique;       // sampling technique of the training subset
    std::string to_percent;         // sampling percent of the training subset
    std::string evaluated_on;       // rendered dataset name
    std::string target;
    double prauc = 0.0;
    double rce = 0.0;
};

struct TestResult {
    double W = 0.0;    // Kendall concordance
    int ddof1 = 0;     // k - 1
    double Q = 0.0;    // chi-square statistic
    double p = 1.0;    // uncorrected
    double p_corr = 1.0;
};

// Chi-square survival function P(X >= q) with `dof` degrees of freedom,
// via the regularized incomplete gamma function (series for small q,
// continued fraction otherwise), absolute tolerance 1e-10.
double chi2_survival(double q, int dof);

// Standard normal survival function.
double normal_survival(double z);

// Keeps exactly the rows whose combination of all factor columns other than
// `target_factor` occurs for every distinct value of `target_factor`.
// `rows[i][f]` is the value of factor f for row i. Returns kept row indices.
std::vector<std::size_t> common_factor_combinations(const std::vector<std::vector<std::string>>& rows,
                                                    std::size_t target_factor);

// Friedman test on an N-subjects x k-treatments matrix. Ties are mid-ranked
// with the standard tie correction; Q = N*(k-1)*W; p from chi2_survival.
TestResult friedman(const std::vector<std::vector<double>>& matrix);

// Two-sided Wilcoxon signed-rank p-value for paired samples. Zero
// differences are dropped; exact enumeration when n <= 25 and no ties in
// |d|, otherwise normal approximation with tie-corrected variance and no
// continuity correction. All differences zero -> p = 1.
double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// Holm step-down correction, clipped at 1, returned in input order.
std::vector<double> holm(std::span<const double> pvals);

// --- The 50-test factor suite over evaluation records ------------------

struct FactorTest {
    std::string metric;       // PRAUC | RCE
    std::string target;       // engagement type
    std::string factor;       // "within" column
    std::string balanced_on;  // the factor itself, or evaluated_on
    bool ran = false;
    std::string skip_reason;
    int n_subjects = 0;
    std::vector<std::string> levels;
    TestResult result;
};

struct PosthocPair {
    std::string metric, target, factor;
    std::string level_a, level_b;
    double p = 1.0;
    double p_corr = 1.0;
};

struct FactorSuiteResult {
    std::vector<FactorTest> friedman_tests;  // Holm-corrected across the family
    std::vector<PosthocPair> posthoc;        // Holm-corrected within each family
};

// Runs Friedman per (metric, target, factor) on balanced records and
// pairwise Wilcoxon posthoc tests where the corrected p falls below alpha.
FactorSuiteResult run_factor_suite(const std::vector<EvalRecord>& records, double alpha = 0.05);

}  // namespace ctxengage
