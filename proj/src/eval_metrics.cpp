#include "ctxengage/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace ctxengage {

double entropy(std::span<const double> p) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0) throw std::runtime_error("negative probability in entropy");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::runtime_error("entropy input does not sum to 1");
    double h = 0.0;
    for (double v : p) {
        if (v > 0) h -= v * std::log(v);
    }
    return h;
}

double cross_entropy(std::span<const std::uint8_t> labels, std::span<const double> preds) {
    if (labels.empty() || labels.size() != preds.size()) throw std::runtime_error("cross_entropy: bad input sizes");
    constexpr double kEps = 1e-15;
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double p = std::clamp(preds[i], kEps, 1.0 - kEps);
        total -= labels[i] ? std::log(p) : std::log(1.0 - p);
    }
    return total / static_cast<double>(labels.size());
}

double ctr(std::span<const std::uint8_t> labels) {
    if (labels.empty()) throw std::runtime_error("ctr: empty labels");
    std::size_t pos = 0;
    for (auto l : labels) pos += (l != 0);
    return static_cast<double>(pos) / static_cast<double>(labels.size());
}

double rce(std::span<const std::uint8_t> labels, std::span<const double> preds) {
    double rate = ctr(labels);
    if (rate <= 0.0 || rate >= 1.0) throw std::runtime_error("rce: labels contain a single class");
    std::vector<double> straw(labels.size(), rate);
    double ce_straw = cross_entropy(labels, straw);
    double ce_pred = cross_entropy(labels, preds);
    return (1.0 - ce_pred / ce_straw) * 100.0;
}

PRCurve pr_curve(std::span<const std::uint8_t> labels, std::span<const double> scores) {
    if (labels.empty() || labels.size() != scores.size()) throw std::runtime_error("pr_curve: bad input sizes");
    std::size_t total_pos = 0;
    for (auto l : labels) total_pos += (l != 0);
    if (total_pos == 0) throw std::runtime_error("pr_curve: no positive labels");

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Walk thresholds in descending score order; each distinct score is one
    // threshold with the ">=" prediction rule.
    std::vector<double> recall_fwd, precision_fwd;
    std::size_t tp = 0, predicted = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            tp += (labels[order[i]] != 0);
            ++predicted;
            ++i;
        }
        recall_fwd.push_back(static_cast<double>(tp) / static_cast<double>(total_pos));
        precision_fwd.push_back(static_cast<double>(tp) / static_cast<double>(predicted));
        if (tp == total_pos) break;  // full recall reached; lower thresholds dropped
    }

    PRCurve curve;
    curve.recall.reserve(recall_fwd.size() + 1);
    curve.precision.reserve(precision_fwd.size() + 1);
    for (std::size_t k = recall_fwd.size(); k-- > 0;) {
        curve.recall.push_back(recall_fwd[k]);
        curve.precision.push_back(precision_fwd[k]);
    }
    curve.recall.push_back(0.0);
    curve.precision.push_back(1.0);
    return curve;
}

double prauc(std::span<const std::uint8_t> labels, std::span<const double> scores) {
    PRCurve c = pr_curve(labels, scores);
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < c.recall.size(); ++i) {
        area += (c.recall[i] - c.recall[i + 1]) * (c.precision[i] + c.precision[i + 1]) * 0.5;
    }
    return area;
}

}  // namespace ctxengage
