#include <doctest.h>

#include <algorithm>

#include "bpred/eval/metrics.hpp"
#include "bpred/learn/classifier.hpp"
#include "bpred/learn/gmm.hpp"
#include "helpers.hpp"

using namespace bpred;
using learn::RowMatrix;

namespace {

learn::GmmModel gaussian_1d(double mu, double var) {
    learn::GmmModel g;
    g.dims = {"v"};
    g.weights = {1.0};
    g.means = {Eigen::VectorXd::Constant(1, mu)};
    g.covariances = {Eigen::MatrixXd::Constant(1, 1, var)};
    return g;
}

RowMatrix column(const std::vector<double>& v) {
    RowMatrix x(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = v[i];
    return x;
}

// Three interleaved classes on two features; class LCL where a*b > 0 outside the
// center disc, LCR where a*b < 0, FLW inside the disc.
learn::LabeledData xor_data(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    learn::LabeledData d;
    d.x.resize(static_cast<Eigen::Index>(n), 2);
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
        d.x(static_cast<Eigen::Index>(i), 0) = a;
        d.x(static_cast<Eigen::Index>(i), 1) = b;
        d.y[i] = a * a + b * b < 0.2 ? 1 : (a * b > 0 ? 0 : 2);
    }
    return d;
}

double train_bacc(const learn::ClassifierModel& m, const learn::LabeledData& d) {
    const auto p = m.predict_proba(d.x);
    std::vector<int> pred(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        pred[i] = learn::argmax({p(r, 0), p(r, 1), p(r, 2)});
    }
    return eval::bacc(eval::confusion(d.y, pred));
}

}  // namespace

TEST_SUITE("learn") {

TEST_CASE("standard normal logpdf at zero") {
    CHECK(learn::gmm_logpdf(gaussian_1d(0, 1), Eigen::VectorXd::Zero(1)) ==
          doctest::Approx(-0.5 * std::log(2 * M_PI)).epsilon(1e-12));
}

TEST_CASE("symmetric two-component mixture: equal densities mirrored about the center") {
    auto g = gaussian_1d(-2, 1);
    g.weights = {0.5, 0.5};
    g.means.push_back(Eigen::VectorXd::Constant(1, 2.0));
    g.covariances.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
    for (double v : {0.3, 1.0, 2.5})
        CHECK(learn::gmm_logpdf(g, Eigen::VectorXd::Constant(1, v)) ==
              doctest::Approx(learn::gmm_logpdf(g, Eigen::VectorXd::Constant(1, -v))).epsilon(1e-12));
}

TEST_CASE("fitted weights form a simplex; model JSON round-trips") {
    Rng rng(2);
    RowMatrix x(2000, 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x(i, 0) = rng.normal() + (i % 2 ? 4 : 0);
        x(i, 1) = rng.normal();
    }
    learn::GmmFitConfig cfg;
    cfg.k_max = 6;
    cfg.restarts = 1;
    const auto fit = learn::fit_gmm(x, {"a", "b"}, cfg);
    double s = 0;
    for (double w : fit.model.weights) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(fit.model.validate());
    const auto back = learn::gmm_from_json(learn::gmm_to_json(fit.model));
    CHECK(back.weights == fit.model.weights);
    for (std::size_t k = 0; k < back.size(); ++k) {
        CHECK(back.means[k] == fit.model.means[k]);
        CHECK(back.covariances[k] == fit.model.covariances[k]);
    }
    CHECK_THROWS_AS(learn::fit_gmm(RowMatrix(0, 2), {"a", "b"}, cfg), DomainError);
}

TEST_CASE("scaler: zero mean unit variance; constant column passes through") {
    Rng rng(6);
    RowMatrix x(500, 2);
    for (Eigen::Index i = 0; i < 500; ++i) {
        x(i, 0) = rng.normal(3, 2);
        x(i, 1) = 7.0;
    }
    const auto sc = learn::fit_scaler(x);
    const RowMatrix z = sc.apply(x);
    const double mean = z.col(0).mean();
    const double var = (z.col(0).array() - mean).square().sum() / 500.0;
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    CHECK(sc.passthrough == std::vector<std::size_t>{1});
    CHECK((z.col(1).array() == 7.0).all());
}

TEST_CASE("probabilities form a simplex for every algorithm") {
    const auto d = xor_data(600, 3);
    learn::Hyper h;
    h.n_tree = 8;
    h.n_iter = 50;
    h.gnb_k_max = 3;
    for (auto algo : {learn::Algo::GNB, learn::Algo::RF, learn::Algo::MLP}) {
        const auto m = learn::fit_classifier(algo, h, {"a", "b"}, d, 1);
        const auto p = m.predict_proba(d.x);
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            CHECK((p.row(i).array() >= 0).all());
            CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-9);
        }
        // JSON round-trip gives identical probabilities
        const auto back = learn::classifier_from_json(learn::classifier_to_json(m));
        CHECK(back.predict_proba(d.x) == p);
    }
}

TEST_CASE("RF with every tree voting one class gives probability one") {
    learn::RfModel rf;
    learn::TreeNode leaf;
    leaf.proba = {1.0, 0.0, 0.0};
    rf.trees.assign(5, {leaf});
    learn::ClassifierModel m;
    m.algo = learn::Algo::RF;
    m.feature_ids = {"a"};
    m.rf = rf;
    const double row = 0.3;
    CHECK(m.predict_proba(&row)[0] == 1.0);
}

TEST_CASE("property: RF probabilities invariant under monotone feature transforms") {
    const auto d = xor_data(400, 9);
    learn::LabeledData t = d;
    for (Eigen::Index i = 0; i < t.x.rows(); ++i) {
        t.x(i, 0) = std::exp(2.0 * d.x(i, 0));
        t.x(i, 1) = std::pow(d.x(i, 1), 3.0) + 5.0;
    }
    learn::Hyper h;
    h.n_tree = 10;
    h.n_splt = 8;
    h.n_smpl = 5;
    const auto a = learn::fit_classifier(learn::Algo::RF, h, {"a", "b"}, d, 17);
    const auto b = learn::fit_classifier(learn::Algo::RF, h, {"a", "b"}, t, 17);
    // Same partitions of the training rows and the same leaf frequencies; only
    // the split points are relabeled. Midpoints move under the transform, so
    // points falling inside a gap may route differently.
    REQUIRE(a.rf.trees.size() == b.rf.trees.size());
    for (std::size_t k = 0; k < a.rf.trees.size(); ++k) {
        REQUIRE(a.rf.trees[k].size() == b.rf.trees[k].size());
        for (std::size_t n = 0; n < a.rf.trees[k].size(); ++n) {
            const auto &p = a.rf.trees[k][n], &q = b.rf.trees[k][n];
            CHECK(p.feature == q.feature);
            CHECK(p.left == q.left);
            CHECK(p.right == q.right);
            CHECK(p.proba == q.proba);
        }
    }
}

TEST_CASE("property: argmax invariant under positive rescaling") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        std::array<double, 3> p{rng.uniform(), rng.uniform(), rng.uniform()};
        const double s = rng.uniform(0.01, 100.0);
        CHECK(learn::argmax(p) == learn::argmax({p[0] * s, p[1] * s, p[2] * s}));
    }
    CHECK(learn::argmax({0.4, 0.4, 0.2}) == 0);
}

TEST_CASE("property: MLP analytic gradient matches central differences") {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t p = 1 + rng.index(4);
        const int h = 1 + static_cast<int>(rng.index(6));
        auto m = learn::init_mlp(p, h, rng.next());
        // spread the weights beyond the small init so the check is not trivial
        m.w1 *= 10.0;
        m.w2 *= 10.0;
        RowMatrix x(7, static_cast<Eigen::Index>(p));
        std::vector<int> y(7);
        for (Eigen::Index i = 0; i < 7; ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
            y[static_cast<std::size_t>(i)] = static_cast<int>(rng.index(3));
        }
        learn::MlpModel g;
        learn::mlp_loss_grad(m, x, y, &g);
        constexpr double step = 1e-5;
        auto check_all = [&](auto member, const auto& analytic) {
            auto& param = m.*member;
            for (Eigen::Index k = 0; k < param.size(); ++k) {
                const double keep = param.data()[k];
                param.data()[k] = keep + step;
                const double up = learn::mlp_loss_grad(m, x, y, nullptr);
                param.data()[k] = keep - step;
                const double down = learn::mlp_loss_grad(m, x, y, nullptr);
                param.data()[k] = keep;
                const double num = (up - down) / (2 * step);
                const double ana = analytic.data()[k];
                CHECK(std::abs(num - ana) <= 1e-4 * std::max({std::abs(num), std::abs(ana), 1e-6}));
            }
        };
        check_all(&learn::MlpModel::w1, g.w1);
        check_all(&learn::MlpModel::b1, g.b1);
        check_all(&learn::MlpModel::w2, g.w2);
        check_all(&learn::MlpModel::b2, g.b2);
    }
}

TEST_CASE("single grid cell is returned as is; ties keep the smaller model") {
    const auto d = xor_data(300, 4);
    std::vector<learn::LabeledData> folds{d, xor_data(300, 5), xor_data(300, 6)};
    learn::Hyper a;
    a.n_tree = 4;
    const auto one = learn::grid_search(learn::Algo::RF, {a}, folds, 1);
    CHECK(one.best == a);
    learn::Hyper small, big;
    small.n_hidd = 2;
    big.n_hidd = 50;
    // RF ordering: fewer trees first
    learn::Hyper rf_big = a, rf_small = a;
    rf_big.n_tree = 6;
    rf_small.n_tree = 3;
    CHECK(learn::smaller_model(learn::Algo::RF, rf_small, rf_big));
    CHECK(learn::smaller_model(learn::Algo::MLP, small, big));
}

TEST_CASE("fit rejects a missing class") {
    auto d = xor_data(100, 1);
    for (auto& y : d.y) y = y == 2 ? 0 : y;
    CHECK_THROWS_AS(learn::fit_classifier(learn::Algo::RF, {}, {"a", "b"}, d, 1), Error);
}

}  // TEST_SUITE learn

TEST_SUITE("derived") {

TEST_CASE("variational fit of a standard normal") {
    Rng rng(31);
    std::vector<double> v(10000);
    for (auto& e : v) e = rng.normal();
    learn::GmmFitConfig cfg;
    cfg.k_max = 5;
    const auto fit = learn::fit_gmm(column(v), {"v"}, cfg);
    const auto& m = fit.model;
    const auto top = static_cast<std::size_t>(std::max_element(m.weights.begin(), m.weights.end()) - m.weights.begin());
    CHECK(m.size() == 1);
    CHECK(m.weights[top] > 0.99);
    CHECK(std::abs(m.means[top](0)) < 0.05);
    CHECK(std::abs(m.covariances[top](0, 0) - 1.0) < 0.05);
}

TEST_CASE("two separated clusters give two components with one-hot responsibilities") {
    Rng rng(32);
    std::vector<double> v;
    for (int i = 0; i < 2000; ++i) v.push_back(rng.normal(i % 2 ? 10.0 : -10.0, 1.0));
    learn::GmmFitConfig cfg;
    cfg.k_max = 5;
    const auto m = learn::fit_gmm(column(v), {"v"}, cfg).model;
    REQUIRE(m.size() == 2);
    for (double x : v) {
        // responsibility of the nearest-mean component
        std::array<double, 2> lp{};
        for (std::size_t k = 0; k < 2; ++k) {
            const double var = m.covariances[k](0, 0);
            lp[k] = std::log(m.weights[k]) - 0.5 * std::log(2 * M_PI * var) - 0.5 * std::pow(x - m.means[k](0), 2) / var;
        }
        const std::size_t nearest = std::abs(x - m.means[0](0)) < std::abs(x - m.means[1](0)) ? 0 : 1;
        const double r = 1.0 / (1.0 + std::exp(lp[1 - nearest] - lp[nearest]));
        CHECK(r > 1.0 - 1e-9);
    }
}

TEST_CASE("logpdf is finite and bounded by its value at the mode") {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        learn::GmmModel g;
        g.dims = {"v"};
        const std::size_t k = 1 + rng.index(4);
        double s = 0;
        for (std::size_t i = 0; i < k; ++i) {
            g.weights.push_back(rng.uniform(0.1, 1.0));
            s += g.weights.back();
            g.means.push_back(Eigen::VectorXd::Constant(1, rng.uniform(-5, 5)));
            g.covariances.push_back(Eigen::MatrixXd::Constant(1, 1, rng.uniform(0.1, 2.0)));
        }
        for (auto& w : g.weights) w /= s;
        // grid search for the global mode, refined around the best point
        double best_x = 0, best = -kInf;
        for (double x = -12; x <= 12; x += 1e-3) {
            const double l = learn::gmm_logpdf(g, Eigen::VectorXd::Constant(1, x));
            if (l > best) best = l, best_x = x;
        }
        for (double x = best_x - 1e-3; x <= best_x + 1e-3; x += 1e-6)
            best = std::max(best, learn::gmm_logpdf(g, Eigen::VectorXd::Constant(1, x)));
        for (int i = 0; i < 200; ++i) {
            const double x = rng.uniform(-30, 30);
            const double l = learn::gmm_logpdf(g, Eigen::VectorXd::Constant(1, x));
            CHECK(std::isfinite(l));
            CHECK(l <= best + 1e-9);
        }
    }
}

TEST_CASE("RF with a single split separates a threshold problem") {
    Rng rng(34);
    learn::LabeledData d;
    d.x.resize(300, 2);
    d.y.resize(300);
    for (Eigen::Index i = 0; i < 300; ++i) {
        const int c = i % 2 ? 0 : 2;
        d.y[static_cast<std::size_t>(i)] = c;
        d.x(i, 0) = c == 0 ? rng.uniform(0, 1) : rng.uniform(2, 3);
        d.x(i, 1) = rng.normal();
    }
    learn::Hyper h;
    h.n_tree = 25;
    h.n_splt = 1;
    h.n_smpl = 2;
    learn::ClassifierModel m;
    m.algo = learn::Algo::RF;
    m.feature_ids = {"key", "noise"};
    m.rf = learn::fit_rf(d, h, 3);
    for (const auto& t : m.rf.trees) CHECK(t.size() <= 3);
    const auto p = m.predict_proba(d.x);
    std::array<std::size_t, 3> hit{}, n{};
    for (Eigen::Index i = 0; i < 300; ++i) {
        const auto y = static_cast<std::size_t>(d.y[static_cast<std::size_t>(i)]);
        ++n[y];
        hit[y] += learn::argmax({p(i, 0), p(i, 1), p(i, 2)}) == static_cast<int>(y);
    }
    CHECK(0.5 * (double(hit[0]) / n[0] + double(hit[2]) / n[2]) == 1.0);
}

TEST_CASE("GNB with symmetric class likelihoods splits evenly") {
    learn::ClassifierModel m;
    m.algo = learn::Algo::GNB;
    m.feature_ids = {"v"};
    m.scaler = learn::identity_scaler(1);
    m.gnb.densities[0] = {gaussian_1d(0, 1)};
    m.gnb.densities[1] = {gaussian_1d(2, 1)};
    m.gnb.densities[2] = {gaussian_1d(200, 1)};  // inactive class far away
    const double x = 1.0;
    const auto p = m.predict_proba(&x);
    CHECK(std::abs(p[0] - 0.5) < 1e-9);
    CHECK(std::abs(p[1] - 0.5) < 1e-9);
    CHECK(p[2] < 1e-9);
    // batch path agrees
    const auto pb = m.predict_proba(column({1.0}));
    CHECK(std::abs(pb(0, 0) - 0.5) < 1e-9);
    CHECK(std::abs(pb(0, 1) - 0.5) < 1e-9);
    const auto post = learn::gnb_posterior({-3.0, -3.0, -1e6});
    CHECK(std::abs(post[0] - 0.5) < 1e-9);
}

TEST_CASE("grid search prefers the network that can represent XOR") {
    std::vector<learn::LabeledData> folds;
    for (std::uint64_t f = 0; f < 3; ++f) folds.push_back(xor_data(600, 40 + f));
    learn::Hyper small, large;
    small.n_hidd = 1;
    large.n_hidd = 27;
    for (auto* h : {&small, &large}) {
        h->alpha = 0.5;
        h->n_iter = 300;
        h->batch = 50;
    }
    const auto res = learn::grid_search(learn::Algo::MLP, {large, small}, folds, 7);
    CHECK(res.best == large);
    REQUIRE(res.scores.size() == 2);
    CHECK(res.scores[1] > res.scores[0]);
}

}  // TEST_SUITE derived
