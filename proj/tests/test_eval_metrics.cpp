#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ctxengage/eval_metrics.hpp"

using namespace ctxengage;

namespace {

std::vector<std::uint8_t> random_labels(std::mt19937_64& rng, std::size_t n, double rate) {
    std::vector<std::uint8_t> y(n);
    bool pos = false, neg = false;
    for (auto& v : y) {
        v = (static_cast<double>(rng() >> 11) * 0x1.0p-53) < rate ? 1 : 0;
        (v ? pos : neg) = true;
    }
    if (!pos) y[0] = 1;
    if (!neg) y[0] = 0;
    return y;
}

}  // namespace

TEST_CASE("entropy worked example and base cases") {
    // Two quarter-outcomes and three sixth-outcomes: 2/4 + 3/6 = 1.
    std::vector<double> p = {0.25, 0.25, 1.0 / 6, 1.0 / 6, 1.0 / 6};
    CHECK(entropy(p) == doctest::Approx(1.58903).epsilon(0).scale(1).epsilon(1e-9));
    CHECK(std::abs(entropy(p) - 1.5890) < 1e-4);
    CHECK(entropy(std::vector<double>{1.0}) == 0.0);
    CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS(entropy(std::vector<double>{0.7, 0.2}));
    CHECK_THROWS(entropy(std::vector<double>{-0.1, 1.1}));
}

TEST_CASE("entropy decomposes into weighted sub-choice entropies") {
    const double root = entropy(std::vector<double>{0.25, 0.25, 1.0 / 6, 1.0 / 6, 1.0 / 6});
    const double h_half = entropy(std::vector<double>{0.5, 0.5});
    const double h_thirds = entropy(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
    const double h_one_two = entropy(std::vector<double>{1.0 / 3, 2.0 / 3});

    const double second_case = 1.5 * h_half + 0.5 * h_thirds;
    const double third_case = (11.0 / 6.0) * h_half + 0.5 * h_one_two;
    CHECK(std::abs(second_case - root) < 1e-6);
    CHECK(std::abs(third_case - root) < 1e-6);

    // Merging the two leaf choices early loses entropy.
    const double premature = 1.5 * h_half + 0.5 * h_one_two;
    CHECK(premature < root - 1e-3);
}

TEST_CASE("cross entropy matches hand-computed values") {
    std::vector<std::uint8_t> y01 = {1, 0};
    std::vector<double> half = {0.5, 0.5};
    CHECK(cross_entropy(y01, half) == doctest::Approx(std::log(2.0)));

    std::vector<std::uint8_t> one = {1};
    std::vector<double> exact = {1.0};
    CHECK(cross_entropy(one, exact) <= 2e-15);

    std::vector<std::uint8_t> y = {1, 1, 0, 0};
    std::vector<double> p = {0.8, 0.6, 0.3, 0.1};
    double expected = -(std::log(0.8) + std::log(0.6) + std::log(0.7) + std::log(0.9)) / 4.0;
    CHECK(cross_entropy(y, p) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(cross_entropy(y, p) - 0.299001) < 1e-6);
}

TEST_CASE("cross entropy of the truth lower-bounds every prediction") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto y = random_labels(rng, 64, 0.3);
        std::vector<double> truth(y.size()), preds(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            truth[i] = y[i];
            preds[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        }
        CHECK(cross_entropy(y, preds) >= cross_entropy(y, truth));
    }
}

TEST_CASE("ctr") {
    CHECK(ctr(std::vector<std::uint8_t>{1, 1, 0, 1}) == 0.75);
    CHECK(ctr(std::vector<std::uint8_t>{0, 0}) == 0.0);
    CHECK(ctr(std::vector<std::uint8_t>{0, 1}) == 0.5);
}

TEST_CASE("rce base cases") {
    std::vector<std::uint8_t> y = {1, 0, 0, 0};
    std::vector<double> straw(4, 0.25);
    CHECK(rce(y, straw) == 0.0);

    std::vector<std::uint8_t> y2 = {1, 0};
    std::vector<double> perfect = {1.0, 0.0};
    CHECK(std::abs(rce(y2, perfect) - 100.0) < 1e-10);

    std::vector<double> half(4, 0.5);
    CHECK(std::abs(rce(y, half) - (-23.2623)) < 1e-3);

    std::vector<std::uint8_t> ones = {1, 1};
    CHECK_THROWS(rce(ones, half));
}

TEST_CASE("rce of the straw man is exactly zero for random label vectors") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto y = random_labels(rng, 50, 0.2 + 0.6 * (trial % 5) / 5.0);
        std::vector<double> straw(y.size(), ctr(y));
        CHECK(rce(y, straw) == 0.0);
    }
}

TEST_CASE("pr curve endpoints and shapes") {
    std::vector<std::uint8_t> y = {1, 0, 0, 0};
    std::vector<double> constant(4, 0.3);
    auto curve = pr_curve(y, constant);
    REQUIRE(curve.recall.size() == 2);
    CHECK(curve.recall[0] == 1.0);
    CHECK(curve.precision[0] == 0.25);
    CHECK(curve.recall[1] == 0.0);
    CHECK(curve.precision[1] == 1.0);

    std::vector<std::uint8_t> y2 = {1, 1, 0, 0};
    std::vector<double> perfect = {0.9, 0.8, 0.2, 0.1};
    CHECK(prauc(y2, perfect) == doctest::Approx(1.0));

    std::vector<std::uint8_t> y3 = {1, 0};
    std::vector<double> anti = {0.1, 0.9};
    CHECK(prauc(y3, anti) == doctest::Approx(0.25));

    std::vector<std::uint8_t> none = {0, 0};
    CHECK_THROWS(pr_curve(none, anti));
}

TEST_CASE("constant predictions give (1+pi)/2 exactly") {
    std::mt19937_64 rng(3);
    for (double pi : {0.003, 0.25, 0.5}) {
        std::size_t n = 1000;
        std::vector<std::uint8_t> y(n, 0);
        for (std::size_t i = 0; i < static_cast<std::size_t>(pi * static_cast<double>(n) + 0.5); ++i) y[i] = 1;
        // Shuffle so ordering cannot matter.
        for (std::size_t i = n; i > 1; --i) std::swap(y[i - 1], y[rng() % i]);
        std::vector<double> constant(n, 0.4);
        double rate = ctr(y);
        CHECK(std::abs(prauc(y, constant) - (1.0 + rate) / 2.0) <= 1e-12);
    }
}

TEST_CASE("prauc is invariant under strictly monotone score transforms") {
    std::mt19937_64 rng(9);
    auto y = random_labels(rng, 200, 0.2);
    std::vector<double> scores(y.size());
    for (auto& s : scores) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double base = prauc(y, scores);
    std::vector<double> warped(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) warped[i] = std::exp(3.0 * scores[i]) - 0.5;
    CHECK(prauc(y, warped) == doctest::Approx(base).epsilon(1e-12));
}
