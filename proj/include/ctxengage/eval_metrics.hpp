#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ctxengage {

// PRAUC and RCE exactly as the challenge scored them, plus the entropy and
// cross-entropy building blocks they rest on. All logarithms are natural.

// Shannon entropy of a distribution, in nats (K = 1). 0*ln(0) := 0.
// Throws on negative entries or a sum off 1 by more than 1e-9.
double entropy(std::span<const double> p);

// Mean clipped negative log-likelihood; predictions clipped to
// [1e-15, 1 - 1e-15]. Labels are 0/1.
double cross_entropy(std::span<const std::uint8_t> labels, std::span<const double> preds);

// Fraction of positive labels.
double ctr(std::span<const std::uint8_t> labels);

// Relative cross-entropy versus the straw man that constantly predicts the
// ground-truth CTR. Requires both classes present.
double rce(std::span<const std::uint8_t> labels, std::span<const double> preds);

// Precision-recall curve: recall weakly decreasing from 1 toward 0, final
// point exactly (0, 1). Thresholds are distinct scores descending with the
// ">= threshold" rule, trimmed once full recall is reached.
struct PRCurve {
    std::vector<double> recall;
    std::vector<double> precision;
};

PRCurve pr_curve(std::span<const std::uint8_t> labels, std::span<const double> scores);

// Trapezoid area under pr_curve.
double prauc(std::span<const std::uint8_t> labels, std::span<const double> scores);

}  // namespace ctxengage
