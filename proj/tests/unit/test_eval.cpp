#include <doctest.h>

#include <fstream>
#include <sstream>

#include "bpred/eval/metrics.hpp"
#include "bpred/predict/predict.hpp"
#include "helpers.hpp"

using namespace bpred;

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

eval::Confusion from_recalls() {
    // recalls 2/4, 4/4, 3/4
    eval::Confusion c{};
    c[0] = {2, 1, 1};
    c[1] = {0, 4, 0};
    c[2] = {0, 1, 3};
    return c;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("balanced accuracy edge cases") {
    eval::Confusion diag{};
    for (std::size_t i = 0; i < 3; ++i) diag[i][i] = 5;
    CHECK(eval::bacc(diag) == 1.0);
    CHECK(eval::bacc(eval::confusion({0, 1, 2, 0}, {1, 1, 1, 1})) == doctest::Approx(1.0 / 3));
    eval::Confusion empty_class{};
    empty_class[0][0] = 1;
    empty_class[1][1] = 1;
    CHECK_THROWS_AS(eval::bacc(empty_class), DomainError);
}

TEST_CASE("property: a uniform random classifier scores about one third") {
    Rng rng(4);
    std::vector<int> truth(30000), pred(30000);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth[i] = static_cast<int>(rng.index(3));
        pred[i] = static_cast<int>(rng.index(3));
    }
    // per-class recall sd is about sqrt(2/9 / 10000); the mean of three is tighter
    CHECK(std::abs(eval::bacc(eval::confusion(truth, pred)) - 1.0 / 3) < 3 * 0.0048);
}

TEST_CASE("AUC trivial cases and curve invariants") {
    CHECK(eval::roc_auc({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0}).auc == 1.0);
    CHECK(eval::roc_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}).auc == 0.5);
    CHECK_THROWS_AS(eval::roc_auc({0.1, 0.2}, {1, 1}), DomainError);
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.index(60);
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = static_cast<int>(i % 2);
            s[i] = std::round(rng.normal(y[i], 1.0) * 4) / 4;  // coarse scores give ties
        }
        const auto r = eval::roc_auc(s, y);
        std::vector<double> neg(n);
        for (std::size_t i = 0; i < n; ++i) neg[i] = -s[i];
        CHECK(eval::roc_auc(neg, y).auc == doctest::Approx(1.0 - r.auc).epsilon(1e-12));
        const auto& pts = r.curve.points;
        CHECK(pts.front().fpr == 0.0);
        CHECK(pts.front().tpr == 0.0);
        CHECK(pts.back().fpr == 1.0);
        CHECK(pts.back().tpr == 1.0);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].fpr >= pts[i - 1].fpr);
            CHECK(pts[i].tpr >= pts[i - 1].tpr);
            CHECK(pts[i].threshold < pts[i - 1].threshold);
        }
    }
}

TEST_CASE("working point on separable data and unconstrained") {
    const auto r = eval::roc_auc({0.9, 0.8, 0.3, 0.2}, {1, 1, 0, 0});
    CHECK(eval::working_point(r.curve, 0.01) == 0.8);
    CHECK(eval::working_point(r.curve, 1.0) == -kInf);
}

TEST_CASE("detection times: never detected and capped") {
    std::vector<double> times;
    for (std::size_t k = 0; k < 80; ++k) times.push_back(frame_time(k));
    const double t_x = 8.0;
    const auto none = eval::detection_times(times, std::vector<bool>(times.size(), false), t_x);
    CHECK(none.tau_f == 0.0);
    CHECK(none.tau_c == 0.0);
    const auto all = eval::detection_times(times, std::vector<bool>(times.size(), true), t_x);
    CHECK(all.tau_f == 5.0);
    CHECK(all.tau_c == 5.0);
    std::vector<double> shorter(times.begin() + 40, times.end());
    CHECK_THROWS_AS(eval::detection_times(shorter, std::vector<bool>(shorter.size(), true), t_x), DomainError);
}

TEST_CASE("property: certainty never precedes the first detection") {
    Rng rng(8);
    std::vector<double> times;
    for (std::size_t k = 0; k < 100; ++k) times.push_back(frame_time(k));
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<bool> det(times.size());
        const double p = rng.uniform();
        for (std::size_t i = 0; i < det.size(); ++i) det[i] = rng.bernoulli(p);
        const auto d = eval::detection_times(times, det, 9.5);
        CHECK(d.tau_c <= d.tau_f);
        CHECK(d.tau_c >= 0.0);
        CHECK(d.tau_f <= 5.0);
    }
}

TEST_CASE("normalized log-likelihood: identity and antitone") {
    CHECK(eval::normalize_loglik(-3.0, -3.0) == 100.0);
    Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        const double ref = -rng.uniform(0.1, 20), a = -rng.uniform(0.1, 20), b = -rng.uniform(0.1, 20);
        if (a < b) CHECK(eval::normalize_loglik(a, ref) <= eval::normalize_loglik(b, ref));
    }
}

TEST_CASE("average log-likelihood of unit Gaussians at their targets") {
    std::vector<double> lp;
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        const double target = rng.normal();
        predict::PositionDistribution d{{1.0}, {target}, {1.0}};
        lp.push_back(d.logpdf(target));
    }
    CHECK(eval::avg_loglik(lp) == doctest::Approx(-0.5 * std::log(2 * M_PI)).epsilon(1e-12));
    // mixture density equals log-sum-exp of its components
    predict::PositionDistribution m{{0.3, 0.7}, {0.0, 2.0}, {1.0, 0.5}};
    const double direct = std::log(0.3 * std::exp(-0.5 * 1.0) / std::sqrt(2 * M_PI) +
                                   0.7 * std::exp(-0.5 * 1.0 / 0.5) / std::sqrt(2 * M_PI * 0.5));
    CHECK(m.logpdf(1.0) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("spatial errors: perfect prediction, constant offset, zero at t = 0") {
    std::vector<double> times{0.0, 2.5, 5.0};
    std::vector<std::vector<std::array<double, 2>>> truth, pred, offset;
    Rng rng(5);
    for (int i = 0; i < 9; ++i) {
        std::vector<std::array<double, 2>> tr{{0, 0}}, pr{{0, 0}}, off{{0, 0.3}};
        for (int k = 1; k < 3; ++k) {
            const std::array<double, 2> p{rng.uniform(0, 150), rng.normal()};
            tr.push_back(p);
            pr.push_back({p[0] + rng.normal(), p[1] + rng.normal()});
            off.push_back({p[0], p[1] + 0.3});
        }
        truth.push_back(tr);
        pred.push_back(pr);
        offset.push_back(off);
    }
    std::vector<int> cls(9, 1);
    const auto perfect = eval::spatial_errors(eval::trajectory_errors(times, truth, truth, cls));
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(perfect.y[k].median == 0.0);
    const auto shifted = eval::spatial_errors(eval::trajectory_errors(times, truth, offset, cls));
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(shifted.y[k].median == doctest::Approx(0.3).epsilon(1e-9));
    const auto noisy = eval::spatial_errors(eval::trajectory_errors(times, truth, pred, cls));
    CHECK(noisy.y[0].median == 0.0);
    CHECK(noisy.x[0].median == 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(noisy.y[k].q1 >= 0.0);
}

TEST_CASE("empty report gives header-only files") {
    testutil::TempDir dir("report_empty");
    eval::emit_report({}, dir.path);
    for (const char* f : {"roc_LCL.csv", "roc_FLW.csv", "roc_LCR.csv", "errors_by_t.csv", "tau_hist.csv",
                          "loglik_table.csv", "confidence_scatter.csv"}) {
        const auto lines = read_lines(dir.path / f);
        CHECK_MESSAGE(lines.size() == 1, f);
    }
}

TEST_CASE("reloaded AUC equals the computed AUC; rows are monotone") {
    testutil::TempDir dir("report_roc");
    eval::ReportBundle rb;
    const auto r = eval::roc_auc({0.9, 0.4, 0.6, 0.2, 0.7}, {1, 1, 0, 0, 1});
    rb.rocs.push_back({"RF", 0, r});
    eval::emit_report(rb, dir.path);
    const auto lines = read_lines(dir.path / "roc_LCL.csv");
    REQUIRE(lines.size() == r.curve.points.size() + 1);
    double prev_fpr = -1, prev_tpr = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> cells;
        std::stringstream ss(lines[i]);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        REQUIRE(cells.size() == 5);
        CHECK(std::stod(cells[4]) == r.auc);
        CHECK(std::stod(cells[2]) >= prev_fpr);
        CHECK(std::stod(cells[3]) >= prev_tpr);
        prev_fpr = std::stod(cells[2]);
        prev_tpr = std::stod(cells[3]);
    }
}

TEST_CASE("unwritable report path") {
    testutil::TempDir dir("report_bad");
    std::ofstream(dir.path / "file") << "x";
    CHECK_THROWS_AS(eval::emit_report({}, dir.path / "file" / "sub"), Error);
}

}  // TEST_SUITE eval

TEST_SUITE("derived") {

TEST_CASE("balanced accuracy is the mean of recalls") { CHECK(std::abs(eval::bacc(from_recalls()) - 0.75) < 1e-9); }

TEST_CASE("AUC with three of four pairs ordered") {
    CHECK(std::abs(eval::roc_auc({0.9, 0.4, 0.6, 0.2}, {1, 1, 0, 0}).auc - 0.75) < 1e-9);
}

TEST_CASE("one allowed false positive among 100 negatives") {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 100; ++i) {
        s.push_back(i / 100.0);  // highest 0.99, second 0.98
        y.push_back(0);
    }
    for (double p : {0.995, 0.985, 0.975, 0.5}) {
        s.push_back(p);
        y.push_back(1);
    }
    const double thr = eval::working_point(eval::roc_auc(s, y).curve, 0.01);
    CHECK(thr > 0.98);
    CHECK(thr == 0.985);
}

TEST_CASE("hand-traced detection sequence with a flicker") {
    // 10 Hz trace over [t_x - 5, t_x), t_x = 10
    std::vector<double> times;
    std::vector<bool> det;
    for (std::size_t k = 50; k < 100; ++k) {
        const double t = frame_time(k);
        times.push_back(t);
        const bool flicker = k >= 70 && k <= 73;  // off from t_x - 3.0 to t_x - 2.7
        det.push_back(k >= 65 && !flicker);
    }
    const auto d = eval::detection_times(times, det, 10.0);
    CHECK(std::abs(d.tau_f - 3.5) < 1e-9);
    CHECK(std::abs(d.tau_c - 2.6) < 1e-9);
}

TEST_CASE("widening every sigma tenfold lowers the mean log-likelihood by ln 10") {
    Rng rng(6);
    std::vector<double> narrow, wide;
    for (int i = 0; i < 50; ++i) {
        const double mu = rng.normal(0, 3), var = rng.uniform(0.1, 4.0);
        narrow.push_back(predict::PositionDistribution{{1.0}, {mu}, {var}}.logpdf(mu));
        wide.push_back(predict::PositionDistribution{{1.0}, {mu}, {100.0 * var}}.logpdf(mu));
    }
    CHECK(std::abs(eval::avg_loglik(narrow) - eval::avg_loglik(wide) - std::log(10.0)) < 1e-9);
}

TEST_CASE("median of two lateral errors") {
    std::vector<double> times{5.0};
    std::vector<std::vector<std::array<double, 2>>> truth{{{{0, 0}}}, {{{0, 0}}}};
    std::vector<std::vector<std::array<double, 2>>> pred{{{{0, 0.1}}}, {{{0, -0.5}}}};
    const auto t = eval::spatial_errors(eval::trajectory_errors(times, truth, pred, {0, 2}));
    CHECK(std::abs(t.y[0].median - 0.3) < 1e-9);
}

}  // TEST_SUITE derived

TEST_SUITE("loglik_table") {

TEST_CASE("normalization reproduces the published table arithmetic") {
    const auto one_decimal = [](double v) { return std::round(v * 10.0) / 10.0; };
    CHECK(one_decimal(eval::normalize_loglik(-7.608, -7.547)) == 99.2);
    CHECK(one_decimal(eval::normalize_loglik(-13.273, -14.066)) == 106.0);
}

}  // TEST_SUITE loglik_table
