#include "bpred/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "bpred/core/stats.hpp"
#include "bpred/core/types.hpp"

namespace bpred::eval {

Confusion confusion(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size()) throw DomainError("confusion: length mismatch");
    Confusion c{};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] > 2 || predicted[i] < 0 || predicted[i] > 2)
            throw DomainError("confusion: class index outside 0..2");
        ++c[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
    }
    return c;
}

double bacc(const Confusion& c) {
    double sum = 0.0;
    for (std::size_t m = 0; m < 3; ++m) {
        const std::size_t p = c[m][0] + c[m][1] + c[m][2];
        if (p == 0) throw DomainError("bacc: class " + std::string(to_string(kManeuvers[m])) + " has no samples");
        sum += static_cast<double>(c[m][m]) / static_cast<double>(p);
    }
    return sum / 3.0;
}

RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& positive) {
    if (scores.size() != positive.size()) throw DomainError("roc_auc: length mismatch");
    std::size_t n_pos = 0;
    for (int p : positive) n_pos += p ? 1 : 0;
    const std::size_t n_neg = scores.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DomainError("roc_auc: labels contain a single class");

    const auto ranks = average_ranks(scores);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (positive[i]) rank_sum += ranks[i];
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    RocResult res;
    res.auc = (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    auto& pts = res.curve.points;
    pts.push_back({kInf, 0.0, 0.0});
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            if (positive[order[i]])
                ++tp;
            else
                ++fp;
            ++i;
        }
        pts.push_back({s, static_cast<double>(fp) / nn, static_cast<double>(tp) / np});
    }
    pts.push_back({-kInf, 1.0, 1.0});
    return res;
}

double working_point(const RocCurve& roc, double fpr_max) {
    if (roc.points.empty()) throw DomainError("working_point: empty curve");
    double thr = roc.points.front().threshold;
    for (const auto& p : roc.points) {
        if (p.fpr > fpr_max) break;
        thr = p.threshold;
    }
    return thr;
}

DetectionTimes detection_times(const std::vector<double>& times, const std::vector<bool>& detected, double t_x,
                               double cap) {
    if (times.size() != detected.size()) throw DomainError("detection_times: length mismatch");
    constexpr double eps = 1e-9;
    const double start = t_x - cap;
    if (times.empty() || times.front() > start + eps)
        throw DomainError("detection_times: trace does not cover the " + std::to_string(cap) + " s before the crossing");
    DetectionTimes out;
    bool first_found = false;
    bool run = false;
    double run_start = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t < start - eps) continue;
        if (t >= t_x - eps) break;
        if (detected[i]) {
            if (!first_found) {
                first_found = true;
                out.tau_f = std::min(cap, t_x - t);
            }
            if (!run) {
                run = true;
                run_start = t;
            }
        } else {
            run = false;
        }
    }
    if (run) out.tau_c = std::min(cap, t_x - run_start);
    return out;
}

double normalize_loglik(double value, double reference) {
    if (value == 0.0) throw DomainError("normalize_loglik: zero log-likelihood");
    return 100.0 * reference / value;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw DomainError("quantile of an empty sample");
    if (q < 0.0 || q > 1.0) throw DomainError("quantile level outside [0, 1]");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return w == 0.0 ? v[lo] : v[lo] + w * (v[hi] - v[lo]);
}

CorrelationTest spearman_test(const std::vector<double>& x, const std::vector<double>& y) {
    CorrelationTest out;
    out.rho = pearson(average_ranks(x), average_ranks(y));
    const double n = static_cast<double>(x.size());
    if (n < 3) return out;
    const double r2 = out.rho * out.rho;
    if (r2 >= 1.0) {
        out.p_value = 0.0;
        return out;
    }
    const double t = out.rho * std::sqrt((n - 2.0) / (1.0 - r2));
    boost::math::students_t dist(n - 2.0);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return out;
}

}  // namespace bpred::eval
