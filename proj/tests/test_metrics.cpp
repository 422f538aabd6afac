#include <doctest.h>

#include <cmath>
#include <random>

#include "avdb/error.hpp"
#include "avdb/metrics.hpp"
#include "oracles.hpp"

using namespace avdb;
using namespace avdb::test;

TEST_CASE("confusion counts the four cells") {
    std::vector<Label> truth, preds;
    for (int i = 0; i < 10; ++i) {
        truth.push_back(Label::Drone);
        preds.push_back(Label::Drone);
    }
    for (int i = 0; i < 10; ++i) {
        truth.push_back(Label::Bird);
        preds.push_back(Label::Bird);
    }
    ConfusionMatrix cm = confusion(preds, truth);
    CHECK(cm.tp == 10);
    CHECK(cm.tn == 10);
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);

    std::vector<Label> all_drone(20, Label::Drone);
    ConfusionMatrix cd = confusion(all_drone, truth);
    CHECK(cd.tp == 10);
    CHECK(cd.fp == 10);
    CHECK(cd.tn == 0);
    CHECK(cd.fn == 0);
}

TEST_CASE("confusion matches an independent tally on random data") {
    std::mt19937 gen(51);
    std::vector<Label> truth, preds;
    for (int i = 0; i < 50; ++i) {
        truth.push_back(gen() % 2 ? Label::Drone : Label::Bird);
        preds.push_back(gen() % 2 ? Label::Drone : Label::Bird);
    }
    ConfusionMatrix a = confusion(preds, truth);
    ConfusionMatrix b = confusion_oracle(preds, truth);
    CHECK(a.tp == b.tp);
    CHECK(a.tn == b.tn);
    CHECK(a.fp == b.fp);
    CHECK(a.fn == b.fn);
    CHECK(a.total() == 50);
}

TEST_CASE("confusion rejects mismatched or empty input") {
    std::vector<Label> two{Label::Drone, Label::Bird};
    std::vector<Label> one{Label::Drone};
    CHECK_THROWS_AS(confusion(two, one), Error);
    CHECK_THROWS_AS(confusion({}, {}), Error);
}

TEST_CASE("report computes the three ratios") {
    MetricReport r = report({50, 45, 3, 2});
    CHECK(*r.accuracy == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(*r.accuracy == 95.0 / 100.0);

    MetricReport s = report({8, 5, 2, 1});
    CHECK(*s.accuracy == 13.0 / 16.0);
    CHECK(*s.sensitivity == 8.0 / 9.0);
    CHECK(*s.precision == 0.8);
}

TEST_CASE("report reproduces the published headline row") {
    // tp=93 tn=97 fp=3 fn=7 rounds to sensitivity 93%, precision 97%,
    // accuracy 95%.
    MetricReport r = report({93, 97, 3, 7});
    CHECK(std::lround(*r.sensitivity * 100) == 93);
    CHECK(std::lround(*r.precision * 100) == 97);
    CHECK(std::lround(*r.accuracy * 100) == 95);
}

TEST_CASE("zero denominators yield unset metrics, never NaN") {
    MetricReport r = report({0, 5, 2, 0});
    CHECK(!r.sensitivity.has_value());  // no true drones evaluated
    CHECK(r.precision.has_value());
    CHECK(*r.accuracy == 5.0 / 7.0);

    MetricReport p = report({0, 5, 0, 2});
    CHECK(!p.precision.has_value());

    MetricReport empty = report({0, 0, 0, 0});
    CHECK(!empty.accuracy.has_value());
}

TEST_CASE("accuracy matches exact rational arithmetic") {
    std::mt19937 gen(52);
    std::uniform_int_distribution<std::uint64_t> d(0, 500);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionMatrix cm{d(gen), d(gen), d(gen), d(gen)};
        if (cm.total() == 0) continue;
        MetricReport r = report(cm);
        long double exact =
            static_cast<long double>(cm.tp + cm.tn) / static_cast<long double>(cm.total());
        CHECK(std::abs(static_cast<long double>(*r.accuracy) - exact) <=
              std::numeric_limits<double>::epsilon() * exact);
    }
}

TEST_CASE("swapping the positive class swaps the cells, accuracy unchanged") {
    std::mt19937 gen(53);
    std::vector<Label> truth, preds;
    for (int i = 0; i < 200; ++i) {
        truth.push_back(gen() % 2 ? Label::Drone : Label::Bird);
        preds.push_back(gen() % 3 ? truth.back()
                                  : (truth.back() == Label::Drone ? Label::Bird
                                                                  : Label::Drone));
    }
    auto flip = [](std::vector<Label> v) {
        for (auto& l : v) l = l == Label::Drone ? Label::Bird : Label::Drone;
        return v;
    };
    ConfusionMatrix cm = confusion(preds, truth);
    ConfusionMatrix swapped = confusion(flip(preds), flip(truth));
    CHECK(swapped.tp == cm.tn);
    CHECK(swapped.tn == cm.tp);
    CHECK(swapped.fp == cm.fn);
    CHECK(swapped.fn == cm.fp);
    CHECK(*report(swapped).accuracy == *report(cm).accuracy);
}

TEST_CASE("sensitivity and precision are monotone in tp") {
    std::mt19937 gen(54);
    std::uniform_int_distribution<std::uint64_t> d(0, 80);
    for (int trial = 0; trial < 100; ++trial) {
        ConfusionMatrix cm{d(gen), d(gen), d(gen), d(gen)};
        ConfusionMatrix more{cm.tp + 1, cm.tn, cm.fp, cm.fn};
        MetricReport a = report(cm), b = report(more);
        if (a.sensitivity) CHECK(*b.sensitivity >= *a.sensitivity);
        if (a.precision) CHECK(*b.precision >= *a.precision);
    }
}

TEST_CASE("misclassified ids are listed in input order") {
    std::vector<std::string> ids{"a", "b", "c", "d"};
    std::vector<Label> truth{Label::Drone, Label::Bird, Label::Drone, Label::Bird};
    std::vector<Label> preds{Label::Drone, Label::Drone, Label::Bird, Label::Bird};
    CHECK(misclassified_ids(ids, preds, truth) == std::vector<std::string>{"b", "c"});
    CHECK_THROWS_AS(misclassified_ids({"x"}, preds, truth), Error);
}
