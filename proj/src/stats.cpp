#include "ctxengage/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ctxengage {

namespace {

constexpr double kGammaTol = 1e-10;

double log_gamma(double x) { return std::lgamma(x); }

// Lower regularized incomplete gamma P(a, x) by series expansion.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaTol) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Upper regularized incomplete gamma Q(a, x) by Lentz continued fraction.
double gamma_q_cf(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaTol) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

// Mid-ranks of v; also accumulates sum(t^3 - t) over tie groups.
std::vector<double> mid_ranks(const std::vector<double>& v, double* tie_term) {
    std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && v[order[j]] == v[order[i]]) ++j;
        double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        if (tie_term) {
            double t = static_cast<double>(j - i);
            *tie_term += t * t * t - t;
        }
        i = j;
    }
    return ranks;
}

}  // namespace

double chi2_survival(double q, int dof) {
    if (dof < 1) throw std::runtime_error("chi2_survival: dof must be >= 1");
    if (q <= 0.0) return 1.0;
    double a = 0.5 * dof;
    double x = 0.5 * q;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double normal_survival(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::vector<std::size_t> common_factor_combinations(const std::vector<std::vector<std::string>>& rows,
                                                    std::size_t target_factor) {
    if (rows.empty()) return {};
    const std::size_t ncols = rows.front().size();
    if (target_factor >= ncols) throw std::runtime_error("common_factor_combinations: bad target column");

    std::set<std::string> all_values;
    for (const auto& r : rows) all_values.insert(r[target_factor]);
    if (all_values.size() < 2)
        throw std::runtime_error("common_factor_combinations: target factor needs >= 2 distinct values");

    auto combo_key = [&](const std::vector<std::string>& r) {
        std::string key;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (c == target_factor) continue;
            key += r[c];
            key += '\x1f';
        }
        return key;
    };

    std::map<std::string, std::set<std::string>> seen;
    for (const auto& r : rows) seen[combo_key(r)].insert(r[target_factor]);

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (seen[combo_key(rows[i])].size() == all_values.size()) kept.push_back(i);
    }
    return kept;
}

TestResult friedman(const std::vector<std::vector<double>>& matrix) {
    const std::size_t n = matrix.size();
    if (n < 2) throw std::runtime_error("friedman: need at least 2 subjects");
    const std::size_t k = matrix.front().size();
    if (k < 2) throw std::runtime_error("friedman: need at least 2 treatments");
    for (const auto& row : matrix)
        if (row.size() != k) throw std::runtime_error("friedman: ragged matrix");

    std::vector<double> rank_sums(k, 0.0);
    double tie_sum = 0.0;
    for (const auto& row : matrix) {
        double tie_term = 0.0;
        auto ranks = mid_ranks(row, &tie_term);
        tie_sum += tie_term;
        for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    }

    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    double s = 0.0;
    const double mean_rank_sum = nd * (kd + 1.0) / 2.0;
    for (double rj : rank_sums) s += (rj - mean_rank_sum) * (rj - mean_rank_sum);

    // Kendall's W with tie correction; Q = N (k-1) W.
    const double denom = nd * nd * (kd * kd * kd - kd) - nd * tie_sum;
    TestResult out;
    out.ddof1 = static_cast<int>(k) - 1;
    if (denom <= 0.0) {
        out.W = 0.0;
        out.Q = 0.0;
        out.p = 1.0;
    } else {
        out.W = 12.0 * s / denom;
        out.Q = nd * (kd - 1.0) * out.W;
        out.p = chi2_survival(out.Q, out.ddof1);
    }
    out.p_corr = out.p;
    return out;
}

double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw std::runtime_error("wilcoxon: bad input sizes");
    std::vector<double> d;
    d.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        if (diff != 0.0) d.push_back(diff);
    }
    const std::size_t n = d.size();
    if (n == 0) return 1.0;

    std::vector<double> abs_d(n);
    for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::abs(d[i]);
    double tie_term = 0.0;
    auto ranks = mid_ranks(abs_d, &tie_term);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0) w_plus += ranks[i];

    const bool has_ties = tie_term > 0.0;
    if (n <= 25 && !has_ties) {
        // Exact null distribution of W+ over all 2^n sign assignments:
        // ways[s] = number of rank subsets summing to s.
        const std::size_t max_sum = n * (n + 1) / 2;
        std::vector<double> ways(max_sum + 1, 0.0);
        ways[0] = 1.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t s = max_sum + 1; s-- > i;) ways[s] += ways[s - i];
        }
        const double total = std::pow(2.0, static_cast<double>(n));
        const auto w = static_cast<std::size_t>(std::llround(w_plus));
        double below = 0.0, above = 0.0;
        for (std::size_t s = 0; s <= max_sum; ++s) {
            if (s <= w) below += ways[s];
            if (s >= w) above += ways[s];
        }
        return std::min(1.0, 2.0 * std::min(below, above) / total);
    }

    const double nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) return 1.0;
    const double z = (w_plus - mu) / std::sqrt(var);
    return std::min(1.0, 2.0 * normal_survival(std::abs(z)));
}

std::vector<double> holm(std::span<const double> pvals) {
    const std::size_t m = pvals.size();
    for (double p : pvals)
        if (p < 0.0 || p > 1.0) throw std::runtime_error("holm: p-value outside [0, 1]");
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pvals[x] < pvals[y]; });

    std::vector<double> out(m, 0.0);
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double adjusted = static_cast<double>(m - i) * pvals[order[i]];
        running = std::min(1.0, std::max(running, adjusted));
        out[order[i]] = running;
    }
    return out;
}

namespace {

const std::vector<std::string> kSuiteFactors = {"algorithm", "note", "feature_selection", "to_technique",
                                                "to_percent"};

std::string factor_value(const EvalRecord& r, const std::string& factor) {
    if (factor == "algorithm") return r.algorithm;
    if (factor == "note") return r.note;
    if (factor == "feature_selection") return r.feature_selection;
    if (factor == "to_technique") return r.to_technique;
    if (factor == "to_percent") return r.to_percent;
    if (factor == "evaluated_on") return r.evaluated_on;
    throw std::runtime_error("unknown factor: " + factor);
}

// All balanceable columns, in a fixed order.
const std::vector<std::string> kAllColumns = {"algorithm", "note",       "feature_selection",
                                              "to_technique", "to_percent", "evaluated_on"};

struct BalancedMatrix {
    std::vector<std::string> levels;
    std::vector<std::string> subjects;
    std::vector<std::vector<double>> values;  // subjects x levels
    std::string skip_reason;                  // non-empty when unusable
};

BalancedMatrix build_matrix(const std::vector<EvalRecord>& records, const std::string& metric,
                            const std::string& target, const std::string& factor, const std::string& balanced_on) {
    BalancedMatrix out;

    std::vector<const EvalRecord*> subset;
    for (const auto& r : records)
        if (r.target == target) subset.push_back(&r);
    if (subset.empty()) {
        out.skip_reason = "no records for target";
        return out;
    }

    std::vector<std::vector<std::string>> rows;
    rows.reserve(subset.size());
    for (const auto* r : subset) {
        std::vector<std::string> row;
        row.reserve(kAllColumns.size());
        for (const auto& c : kAllColumns) row.push_back(factor_value(*r, c));
        rows.push_back(std::move(row));
    }
    std::size_t balance_col =
        std::find(kAllColumns.begin(), kAllColumns.end(), balanced_on) - kAllColumns.begin();

    std::set<std::string> balance_values;
    for (const auto& r : rows) balance_values.insert(r[balance_col]);
    if (balance_values.size() < 2) {
        out.skip_reason = "fewer than 2 values in balancing column";
        return out;
    }
    auto kept = common_factor_combinations(rows, balance_col);
    if (kept.empty()) {
        out.skip_reason = "empty common-factor intersection";
        return out;
    }

    // Subject key: the balancing column when it is the factor's own column is
    // excluded; every other column (except the factor) identifies the subject.
    std::size_t factor_col = std::find(kAllColumns.begin(), kAllColumns.end(), factor) - kAllColumns.begin();
    std::set<std::string> level_set;
    for (auto i : kept) level_set.insert(rows[i][factor_col]);
    if (level_set.size() < 2) {
        out.skip_reason = "fewer than 2 factor levels after balancing";
        return out;
    }
    out.levels.assign(level_set.begin(), level_set.end());

    auto subject_key = [&](std::size_t i) {
        if (balanced_on == factor) {
            std::string key;
            for (std::size_t c = 0; c < kAllColumns.size(); ++c) {
                if (c == factor_col) continue;
                key += rows[i][c];
                key += '\x1f';
            }
            return key;
        }
        return rows[i][balance_col] + '\x1f';
    };

    std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> cells;
    for (auto i : kept) {
        double v = (metric == "PRAUC") ? subset[i]->prauc : subset[i]->rce;
        auto& cell = cells[subject_key(i)][rows[i][factor_col]];
        cell.first += v;
        cell.second += 1;
    }

    for (const auto& [subject, by_level] : cells) {
        std::vector<double> row;
        row.reserve(out.levels.size());
        bool complete = true;
        for (const auto& level : out.levels) {
            auto it = by_level.find(level);
            if (it == by_level.end()) {
                complete = false;
                break;
            }
            row.push_back(it->second.first / static_cast<double>(it->second.second));
        }
        if (complete) {
            out.subjects.push_back(subject);
            out.values.push_back(std::move(row));
        }
    }
    if (out.subjects.size() < 2) {
        out.skip_reason = "fewer than 2 complete subjects";
        out.values.clear();
    }
    return out;
}

}  // namespace

FactorSuiteResult run_factor_suite(const std::vector<EvalRecord>& records, double alpha) {
    FactorSuiteResult suite;

    std::set<std::string> target_set;
    for (const auto& r : records) target_set.insert(r.target);
    const std::vector<std::string> kKnownTargets = {"like", "reply", "retweet", "quote", "react"};
    std::vector<std::string> targets;
    for (const auto& t : kKnownTargets)
        if (target_set.count(t)) targets.push_back(t);

    std::vector<BalancedMatrix> matrices;
    for (const std::string metric : {"PRAUC", "RCE"}) {
        for (const auto& target : targets) {
            for (const auto& factor : kSuiteFactors) {
                // to_technique and to_percent have no common combinations of
                // their own; they are balanced on the subject column instead.
                std::string balanced_on =
                    (factor == "to_technique" || factor == "to_percent") ? "evaluated_on" : factor;
                FactorTest test;
                test.metric = metric;
                test.target = target;
                test.factor = factor;
                test.balanced_on = balanced_on;
                BalancedMatrix m = build_matrix(records, metric, target, factor, balanced_on);
                if (!m.skip_reason.empty()) {
                    test.ran = false;
                    test.skip_reason = m.skip_reason;
                } else {
                    test.ran = true;
                    test.n_subjects = static_cast<int>(m.subjects.size());
                    test.levels = m.levels;
                    test.result = friedman(m.values);
                }
                suite.friedman_tests.push_back(std::move(test));
                matrices.push_back(std::move(m));
            }
        }
    }

    // Holm across the family of Friedman p-values.
    std::vector<double> ps;
    std::vector<std::size_t> ran_idx;
    for (std::size_t i = 0; i < suite.friedman_tests.size(); ++i) {
        if (suite.friedman_tests[i].ran) {
            ps.push_back(suite.friedman_tests[i].result.p);
            ran_idx.push_back(i);
        }
    }
    if (!ps.empty()) {
        auto corrected = holm(ps);
        for (std::size_t i = 0; i < ran_idx.size(); ++i)
            suite.friedman_tests[ran_idx[i]].result.p_corr = corrected[i];
    }

    // Posthoc pairwise Wilcoxon where the corrected Friedman p rejects.
    for (std::size_t i = 0; i < suite.friedman_tests.size(); ++i) {
        const auto& test = suite.friedman_tests[i];
        if (!test.ran || test.result.p_corr >= alpha) continue;
        const auto& m = matrices[i];
        std::vector<PosthocPair> family;
        std::vector<double> family_ps;
        for (std::size_t a = 0; a < m.levels.size(); ++a) {
            for (std::size_t b = a + 1; b < m.levels.size(); ++b) {
                std::vector<double> va, vb;
                va.reserve(m.values.size());
                vb.reserve(m.values.size());
                for (const auto& row : m.values) {
                    va.push_back(row[a]);
                    vb.push_back(row[b]);
                }
                PosthocPair pair;
                pair.metric = test.metric;
                pair.target = test.target;
                pair.factor = test.factor;
                pair.level_a = m.levels[a];
                pair.level_b = m.levels[b];
                pair.p = wilcoxon_signed_rank(va, vb);
                family.push_back(std::move(pair));
                family_ps.push_back(family.back().p);
            }
        }
        if (!family_ps.empty()) {
            auto corrected = holm(family_ps);
            for (std::size_t j = 0; j < family.size(); ++j) family[j].p_corr = corrected[j];
        }
        suite.posthoc.insert(suite.posthoc.end(), family.begin(), family.end());
    }

    return suite;
}

}  // namespace ctxengage
