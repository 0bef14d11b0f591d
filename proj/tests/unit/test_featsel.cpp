#include <doctest.h>

#include <algorithm>

#include "bpred/featsel/featsel.hpp"
#include "helpers.hpp"

using namespace bpred;
using learn::RowMatrix;

namespace {

Catalog catalog_of(std::initializer_list<const char*> ids) {
    Catalog c;
    for (const char* id : ids) c.add({id, FeatureKind::Continuous, "", {}, ""});
    return c;
}

// target uniform on [0, 10]; columns built by `fill(target, rng)`
template <class Fill>
featsel::CorrelationData make_data(std::size_t n, std::size_t p, std::uint64_t seed, Fill fill) {
    Rng rng(seed);
    featsel::CorrelationData d;
    d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    d.target.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.target[i] = rng.uniform(0.0, 10.0);
        fill(d.target[i], rng, d.x.row(static_cast<Eigen::Index>(i)));
    }
    return d;
}

}  // namespace

TEST_SUITE("featsel") {

TEST_CASE("spearman identity and reversal") {
    CHECK(featsel::spearman({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
    CHECK(featsel::spearman({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(featsel::spearman({1, 1, 1}, {1, 2, 3}), DomainError);
    CHECK_THROWS_AS(featsel::spearman({1}, {1}), DomainError);
}

TEST_CASE("property: spearman invariant under strictly monotone transforms") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + rng.index(40);
        std::vector<double> x(n), y(n), fx(n), gy(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.normal();
            y[i] = x[i] * rng.uniform(-1, 1) + rng.normal();
            if (rng.bernoulli(0.2) && i > 0) x[i] = x[i - 1];  // some ties
            fx[i] = std::exp(3.0 * x[i]);
            gy[i] = -std::pow(y[i], 3.0) - y[i];  // decreasing
        }
        const double r = featsel::spearman(x, y);
        CHECK(featsel::spearman(fx, y) == doctest::Approx(r).epsilon(1e-12));
        CHECK(featsel::spearman(x, gy) == doctest::Approx(-r).epsilon(1e-12));
    }
}

TEST_CASE("merit of a single feature is its correlation") {
    CHECK(featsel::cfs_merit(1, 0.4, 0.0) == doctest::Approx(0.4));
    CHECK_THROWS_AS(featsel::cfs_merit(3, 0.5, -0.9), DomainError);
}

TEST_CASE("threshold keeps an exact copy of the target; theta 0 keeps all but constants") {
    auto d = make_data(500, 3, 1, [](double t, Rng& rng, auto row) {
        row(0) = t;
        row(1) = rng.normal();
        row(2) = 4.0;
    });
    const auto cat = catalog_of({"copy", "noise", "const"});
    const auto b = featsel::select_by_threshold(d, cat, 0.15);
    CHECK(b.ids == std::vector<std::string>{"copy"});
    CHECK(featsel::select_by_threshold(d, cat, 0.0).ids == std::vector<std::string>{"copy", "noise"});
}

TEST_CASE("independent equally informative features are all kept") {
    // target = sum of three independent components
    Rng rng(8);
    featsel::CorrelationData d;
    const Eigen::Index n = 4000;
    d.x.resize(n, 3);
    d.target.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) d.x(i, j) = rng.normal();
        d.target[static_cast<std::size_t>(i)] = d.x.row(i).sum();
    }
    const auto c = featsel::cfs_backward_select({featsel::fold_correlations(d)}, catalog_of({"a", "b", "c"}));
    CHECK(c.ids.size() == 3);
}

TEST_CASE("wrapper never drops below one feature and is deterministic") {
    Rng rng(4);
    learn::LabeledData tr, va;
    for (auto* d : {&tr, &va}) {
        d->x.resize(300, 2);
        d->y.resize(300);
        for (Eigen::Index i = 0; i < 300; ++i) {
            d->y[static_cast<std::size_t>(i)] = static_cast<int>(i % 3);
            d->x(i, 0) = rng.normal();
            d->x(i, 1) = rng.normal();
        }
    }
    learn::Hyper h;
    h.n_tree = 8;
    h.n_splt = 4;
    h.n_smpl = 5;
    const auto cat = catalog_of({"n1", "n2"});
    const auto d1 = featsel::wrapper_backward_select(learn::Algo::RF, h, tr, va, cat, {"n1", "n2"}, {0, 3});
    const auto d2 = featsel::wrapper_backward_select(learn::Algo::RF, h, tr, va, cat, {"n1", "n2"}, {0, 3});
    CHECK(!d1.ids.empty());
    CHECK(d1.ids == d2.ids);
    CHECK(d1.variant == 'D');
}

TEST_CASE("feature sets round-trip through JSON") {
    featsel::FeatureSet fs{'C', {"a", "b"}, {{"theta", 0.15}}};
    const auto back = featsel::feature_set_from_json(featsel::to_json(fs));
    CHECK(back.variant == 'C');
    CHECK(back.ids == fs.ids);
    CHECK(back.provenance == fs.provenance);
}

}  // TEST_SUITE featsel

TEST_SUITE("derived") {

TEST_CASE("spearman of a two-swap permutation") {
    CHECK(std::abs(featsel::spearman({1, 2, 3, 4}, {2, 1, 4, 3}) - 0.6) < 1e-9);
}

TEST_CASE("pure noise is dropped by the threshold") {
    auto d = make_data(20000, 2, 2, [](double t, Rng& rng, auto row) {
        row(0) = -t + rng.normal();
        row(1) = rng.normal();
    });
    const auto b = featsel::select_by_threshold(d, catalog_of({"signal", "noise"}), 0.15);
    CHECK(b.ids == std::vector<std::string>{"signal"});
}

TEST_CASE("merit examples") {
    CHECK(std::abs(featsel::cfs_merit(2, 0.5, 0.0) - 1.0 / std::sqrt(2.0)) < 1e-9);
    CHECK(std::abs(featsel::cfs_merit(2, 0.5, 1.0) - 0.5) < 1e-9);
    // subset form agrees with the averaged form
    const std::vector<double> cf{0.5, 0.5};
    const std::vector<std::vector<double>> ff{{1.0, 0.0}, {0.0, 1.0}};
    CHECK(std::abs(featsel::cfs_merit({0, 1}, cf, ff) - 1.0 / std::sqrt(2.0)) < 1e-9);
}

TEST_CASE("CFS removes one of two duplicate copies") {
    auto d = make_data(3000, 2, 3, [](double t, Rng& rng, auto row) {
        row(0) = t + rng.normal(0.0, 2.0);
        row(1) = row(0);
    });
    const auto c = featsel::cfs_backward_select({featsel::fold_correlations(d)}, catalog_of({"x1", "x2"}));
    CHECK(c.ids.size() == 1);
}

TEST_CASE("CFS removes an independent noise feature") {
    std::vector<featsel::FoldCorrelations> folds;
    for (std::uint64_t f = 0; f < 5; ++f) {
        auto d = make_data(3000, 2, 10 + f, [](double t, Rng& rng, auto row) {
            row(0) = rng.normal();
            row(1) = t + rng.normal(0.0, 2.0);
        });
        folds.push_back(featsel::fold_correlations(d));
    }
    const auto c = featsel::cfs_backward_select(folds, catalog_of({"noise", "signal"}));
    CHECK(c.ids == std::vector<std::string>{"signal"});
}

TEST_CASE("wrapper keeps the single predictive feature") {
    Rng rng(5);
    auto make = [&](Eigen::Index n) {
        learn::LabeledData d;
        d.x.resize(n, 4);
        d.y.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = static_cast<int>(i % 3);
            d.y[static_cast<std::size_t>(i)] = c;
            for (Eigen::Index j = 0; j < 4; ++j) d.x(i, j) = rng.normal();
            d.x(i, 2) = 3.0 * c + rng.uniform(0.0, 1.0);  // predictive
        }
        return d;
    };
    const auto tr = make(600), va = make(600);
    learn::Hyper h;
    h.n_tree = 16;
    h.n_splt = 4;
    h.n_smpl = 5;
    const auto cat = catalog_of({"a", "b", "key", "c"});
    const auto d = featsel::wrapper_backward_select(learn::Algo::RF, h, tr, va, cat, {"a", "b", "key", "c"}, {0, 1});
    CHECK(std::find(d.ids.begin(), d.ids.end(), "key") != d.ids.end());
}

}  // TEST_SUITE derived
