#include "bpred/learn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "bpred/core/rng.hpp"
#include "bpred/core/types.hpp"
#include "bpred/eval/metrics.hpp"

namespace bpred::learn {

std::string to_string(Algo a) {
    switch (a) {
        case Algo::GNB: return "GNB";
        case Algo::RF: return "RF";
        case Algo::MLP: return "MLP";
    }
    return "?";
}

Algo parse_algo(const std::string& s) {
    if (s == "GNB") return Algo::GNB;
    if (s == "RF") return Algo::RF;
    if (s == "MLP") return Algo::MLP;
    throw DomainError("unknown classifier algorithm '" + s + "'");
}

LabeledData concat(const std::vector<const LabeledData*>& parts) {
    LabeledData out;
    Eigen::Index rows = 0, cols = -1;
    for (const auto* p : parts) {
        rows += p->x.rows();
        if (p->x.rows() == 0) continue;
        if (cols >= 0 && p->x.cols() != cols) throw DomainError("concat: column counts differ");
        cols = p->x.cols();
    }
    out.x.resize(rows, std::max<Eigen::Index>(cols, 0));
    Eigen::Index r = 0;
    for (const auto* p : parts) {
        if (p->x.rows() == 0) continue;
        out.x.middleRows(r, p->x.rows()) = p->x;
        r += p->x.rows();
        out.y.insert(out.y.end(), p->y.begin(), p->y.end());
    }
    return out;
}

LabeledData select_columns(const LabeledData& d, const std::vector<std::size_t>& columns) {
    LabeledData out;
    out.y = d.y;
    out.x.resize(d.x.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) out.x.col(static_cast<Eigen::Index>(j)) = d.x.col(static_cast<Eigen::Index>(columns[j]));
    return out;
}

LabeledData subsample(const LabeledData& d, std::size_t max_rows, std::uint64_t seed) {
    if (d.size() <= max_rows) return d;
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);
    idx.resize(max_rows);
    std::sort(idx.begin(), idx.end());
    LabeledData out;
    out.x.resize(static_cast<Eigen::Index>(max_rows), d.x.cols());
    for (std::size_t i = 0; i < max_rows; ++i) {
        out.x.row(static_cast<Eigen::Index>(i)) = d.x.row(static_cast<Eigen::Index>(idx[i]));
        out.y.push_back(d.y[idx[i]]);
    }
    return out;
}

// ---------------------------------------------------------------- scaler

void Scaler::apply(double* row) const {
    for (std::size_t j = 0; j < mean.size(); ++j) row[j] = (row[j] - mean[j]) / scale[j];
}

RowMatrix Scaler::apply(const RowMatrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != mean.size()) throw DomainError("scaler: column count mismatch");
    RowMatrix out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i) apply(out.row(i).data());
    return out;
}

Scaler fit_scaler(const RowMatrix& x) {
    Scaler s;
    const auto p = static_cast<std::size_t>(x.cols());
    s.mean.assign(p, 0.0);
    s.scale.assign(p, 1.0);
    if (x.rows() == 0) return s;
    const double n = static_cast<double>(x.rows());
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = x.col(static_cast<Eigen::Index>(j));
        const double m = col.sum() / n;
        const double var = (col.array() - m).square().sum() / n;
        if (var > 0.0) {
            s.mean[j] = m;
            s.scale[j] = std::sqrt(var);
        } else {
            s.passthrough.push_back(j);
        }
    }
    return s;
}

Scaler identity_scaler(std::size_t dim) {
    Scaler s;
    s.mean.assign(dim, 0.0);
    s.scale.assign(dim, 1.0);
    return s;
}

// ---------------------------------------------------------------- GNB

GnbModel fit_gnb(const LabeledData& train, const Hyper& params, std::uint64_t seed) {
    GnbModel g;
    const auto p = static_cast<std::size_t>(train.x.cols());
    std::array<std::vector<std::size_t>, 3> rows;
    for (std::size_t i = 0; i < train.size(); ++i) rows[static_cast<std::size_t>(train.y[i])].push_back(i);
    for (std::size_t c = 0; c < 3; ++c) {
        if (rows[c].empty()) throw Error("GNB: class " + std::string(to_string(kManeuvers[c])) + " has no training rows");
        const auto cap = static_cast<std::size_t>(std::max(1, params.gnb_max_rows));
        if (rows[c].size() > cap) {
            Rng rng(mix_seed(seed, 1000 + c));
            rng.shuffle(rows[c]);
            rows[c].resize(cap);
            std::sort(rows[c].begin(), rows[c].end());
        }
    }

    std::vector<double> feature_var(p);
    for (std::size_t f = 0; f < p; ++f) {
        const auto col = train.x.col(static_cast<Eigen::Index>(f));
        const double m = col.mean();
        feature_var[f] = (col.array() - m).square().mean();
    }
    for (std::size_t c = 0; c < 3; ++c) g.densities[c].resize(p);
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t f = 0; f < p; ++f) jobs.emplace_back(c, f);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(jobs.size()); ++j) {
        const auto [c, f] = jobs[static_cast<std::size_t>(j)];
        RowMatrix col(static_cast<Eigen::Index>(rows[c].size()), 1);
        for (std::size_t i = 0; i < rows[c].size(); ++i)
            col(static_cast<Eigen::Index>(i), 0) = train.x(static_cast<Eigen::Index>(rows[c][i]), static_cast<Eigen::Index>(f));
        GmmFitConfig cfg;
        cfg.k_max = params.gnb_k_max;
        cfg.restarts = params.gnb_restarts;
        cfg.max_iter = 200;
        cfg.deletion_iter = 50;
        cfg.reg = std::max(1e-6, 1e-4 * feature_var[f]);
        cfg.seed = mix_seed(seed, c * 100003 + f);
        g.densities[c][f] = fit_gmm(col, {"f" + std::to_string(f)}, cfg).model;
    }
    return g;
}

std::array<RowMatrix, 3> GnbModel::feature_loglik(const RowMatrix& x) const {
    std::array<RowMatrix, 3> out;
    const auto p = static_cast<std::size_t>(x.cols());
    for (std::size_t c = 0; c < 3; ++c) {
        if (densities[c].size() != p) throw DomainError("GNB: feature count mismatch");
        out[c].resize(x.rows(), x.cols());
        for (std::size_t f = 0; f < p; ++f) {
            GmmDensity dens(densities[c][f]);
            RowMatrix col = x.col(static_cast<Eigen::Index>(f));
            std::vector<double> lp;
            dens.logpdf_batch(col, lp);
            for (Eigen::Index i = 0; i < x.rows(); ++i) out[c](i, static_cast<Eigen::Index>(f)) = lp[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

std::array<double, 3> gnb_posterior(const std::array<double, 3>& ll) {
    const double mx = std::max({ll[0], ll[1], ll[2]});
    std::array<double, 3> p{};
    if (!std::isfinite(mx)) return {1.0 / 3, 1.0 / 3, 1.0 / 3};
    double s = 0.0;
    for (std::size_t c = 0; c < 3; ++c) s += p[c] = std::exp(ll[c] - mx);
    for (auto& v : p) v /= s;
    return p;
}

// ---------------------------------------------------------------- RF

namespace {

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

double gini(const std::array<double, 3>& counts, double n) {
    if (n <= 0.0) return 0.0;
    double s = 0.0;
    for (double c : counts) s += (c / n) * (c / n);
    return 1.0 - s;
}

SplitChoice best_split(const RowMatrix& x, const std::vector<int>& y, const std::vector<std::size_t>& rows,
                       std::size_t n_candidates, Rng& rng) {
    const auto p = static_cast<std::size_t>(x.cols());
    std::vector<std::size_t> feats(p);
    std::iota(feats.begin(), feats.end(), 0);
    // partial Fisher-Yates for the candidate subset
    for (std::size_t i = 0; i < n_candidates; ++i) std::swap(feats[i], feats[i + rng.index(p - i)]);
    feats.resize(n_candidates);
    std::sort(feats.begin(), feats.end());

    std::array<double, 3> total{};
    for (auto r : rows) total[static_cast<std::size_t>(y[r])] += 1.0;
    const double n = static_cast<double>(rows.size());
    const double parent = gini(total, n);

    SplitChoice best;
    std::vector<std::pair<double, int>> vals(rows.size());
    for (auto f : feats) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            vals[i] = {x(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(f)), y[rows[i]]};
        std::sort(vals.begin(), vals.end());
        std::array<double, 3> left{};
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            left[static_cast<std::size_t>(vals[i].second)] += 1.0;
            if (vals[i].first == vals[i + 1].first) continue;
            const double nl = static_cast<double>(i + 1), nr = n - nl;
            std::array<double, 3> right{total[0] - left[0], total[1] - left[1], total[2] - left[2]};
            const double gain = parent - (nl / n) * gini(left, nl) - (nr / n) * gini(right, nr);
            if (gain > best.gain + 1e-12) {
                best.gain = gain;
                best.feature = static_cast<int>(f);
                const double a = vals[i].first, b = vals[i + 1].first;
                double mid = a + 0.5 * (b - a);
                if (!(mid < b)) mid = a;  // adjacent doubles
                best.threshold = mid;
            }
        }
    }
    return best;
}

std::array<double, 3> class_freq(const std::vector<int>& y, const std::vector<std::size_t>& rows) {
    std::array<double, 3> f{};
    for (auto r : rows) f[static_cast<std::size_t>(y[r])] += 1.0;
    const double n = static_cast<double>(rows.size());
    if (n > 0)
        for (auto& v : f) v /= n;
    return f;
}

}  // namespace

std::vector<TreeNode> fit_tree(const RowMatrix& x, const std::vector<int>& y, const std::vector<std::size_t>& rows,
                               const Hyper& params, std::uint64_t seed) {
    Rng rng(seed);
    const auto p = static_cast<std::size_t>(x.cols());
    const std::size_t n_cand = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))));

    std::vector<TreeNode> nodes;
    std::vector<std::vector<std::size_t>> node_rows;
    struct Pending {
        double gain;
        int node;
        SplitChoice split;
    };
    auto cmp = [](const Pending& a, const Pending& b) {
        if (a.gain != b.gain) return a.gain < b.gain;
        return a.node > b.node;  // earlier node first on equal gain
    };
    std::priority_queue<Pending, std::vector<Pending>, decltype(cmp)> heap(cmp);

    auto make_leaf = [&](std::vector<std::size_t> r) {
        TreeNode node;
        node.proba = class_freq(y, r);
        nodes.push_back(node);
        node_rows.push_back(std::move(r));
        const int id = static_cast<int>(nodes.size()) - 1;
        const auto& rr = node_rows.back();
        if (rr.size() >= static_cast<std::size_t>(params.n_smpl) && rr.size() >= 2) {
            const auto s = best_split(x, y, rr, n_cand, rng);
            if (s.feature >= 0) heap.push({s.gain, id, s});
        }
        return id;
    };
    make_leaf(rows);
    int splits = 0;
    while (splits < params.n_splt && !heap.empty()) {
        const Pending top = heap.top();
        heap.pop();
        std::vector<std::size_t> l, r;
        for (auto i : node_rows[static_cast<std::size_t>(top.node)]) {
            if (x(static_cast<Eigen::Index>(i), top.split.feature) <= top.split.threshold)
                l.push_back(i);
            else
                r.push_back(i);
        }
        if (l.empty() || r.empty()) continue;
        node_rows[static_cast<std::size_t>(top.node)].clear();
        node_rows[static_cast<std::size_t>(top.node)].shrink_to_fit();
        const int li = make_leaf(std::move(l));
        const int ri = make_leaf(std::move(r));
        auto& node = nodes[static_cast<std::size_t>(top.node)];
        node.feature = top.split.feature;
        node.threshold = top.split.threshold;
        node.left = li;
        node.right = ri;
        ++splits;
    }
    return nodes;
}

RfModel fit_rf(const LabeledData& train, const Hyper& params, std::uint64_t seed) {
    if (train.size() == 0) throw Error("RF: no training rows");
    if (params.n_tree < 1 || params.n_splt < 0 || params.n_smpl < 1) throw DomainError("RF: invalid hyperparameters");
    RfModel rf;
    rf.trees.resize(static_cast<std::size_t>(params.n_tree));
    const std::size_t n = train.size();
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < params.n_tree; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> boot(n);
        for (auto& b : boot) b = rng.index(n);
        std::sort(boot.begin(), boot.end());
        rf.trees[static_cast<std::size_t>(t)] = fit_tree(train.x, train.y, boot, params, rng.next());
    }
    return rf;
}

namespace {

std::array<double, 3> rf_proba(const RfModel& rf, const double* row) {
    std::array<double, 3> p{};
    for (const auto& tree : rf.trees) {
        int i = 0;
        while (tree[static_cast<std::size_t>(i)].feature >= 0) {
            const auto& nd = tree[static_cast<std::size_t>(i)];
            i = row[nd.feature] <= nd.threshold ? nd.left : nd.right;
        }
        const auto& leaf = tree[static_cast<std::size_t>(i)].proba;
        for (std::size_t c = 0; c < 3; ++c) p[c] += leaf[c];
    }
    const double s = p[0] + p[1] + p[2];
    for (auto& v : p) v /= s;
    return p;
}

}  // namespace

// ---------------------------------------------------------------- MLP

MlpModel init_mlp(std::size_t inputs, int hidden, std::uint64_t seed) {
    if (hidden < 1) throw DomainError("MLP needs at least one hidden unit");
    Rng rng(seed);
    MlpModel m;
    const auto p = static_cast<Eigen::Index>(inputs);
    const auto h = static_cast<Eigen::Index>(hidden);
    auto u = [&] { return rng.uniform(-0.1, 0.1); };
    m.w1.resize(p, h);
    m.b1.resize(h);
    m.w2.resize(h, 3);
    m.b2.resize(3);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < h; ++j) m.w1(i, j) = u();
    for (Eigen::Index j = 0; j < h; ++j) m.b1(j) = u();
    for (Eigen::Index j = 0; j < h; ++j)
        for (Eigen::Index k = 0; k < 3; ++k) m.w2(j, k) = u();
    for (Eigen::Index k = 0; k < 3; ++k) m.b2(k) = u();
    return m;
}

namespace {

Eigen::MatrixXd logistic(const Eigen::MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z) {
    Eigen::MatrixXd out(z.rows(), z.cols());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double mx = z.row(i).maxCoeff();
        const auto e = (z.row(i).array() - mx).exp();
        out.row(i) = e / e.sum();
    }
    return out;
}

}  // namespace

RowMatrix mlp_forward(const MlpModel& m, const RowMatrix& x) {
    const Eigen::MatrixXd h = logistic((x * m.w1).rowwise() + m.b1);
    return softmax_rows((h * m.w2).rowwise() + m.b2);
}

double mlp_loss_grad(const MlpModel& m, const RowMatrix& x, const std::vector<int>& y, MlpModel* grad) {
    const auto n = x.rows();
    const Eigen::MatrixXd h = logistic((x * m.w1).rowwise() + m.b1);
    const Eigen::MatrixXd p = softmax_rows((h * m.w2).rowwise() + m.b2);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss -= std::log(std::max(p(i, y[static_cast<std::size_t>(i)]), 1e-300));
    loss /= static_cast<double>(n);
    if (grad) {
        Eigen::MatrixXd d2 = p;
        for (Eigen::Index i = 0; i < n; ++i) d2(i, y[static_cast<std::size_t>(i)]) -= 1.0;
        d2 /= static_cast<double>(n);
        grad->w2 = h.transpose() * d2;
        grad->b2 = d2.colwise().sum();
        const Eigen::MatrixXd d1 = ((d2 * m.w2.transpose()).array() * h.array() * (1.0 - h.array())).matrix();
        grad->w1 = x.transpose() * d1;
        grad->b1 = d1.colwise().sum();
    }
    return loss;
}

MlpModel fit_mlp(const RowMatrix& x, const std::vector<int>& y, const Hyper& params, std::uint64_t seed) {
    if (x.rows() == 0) throw Error("MLP: no training rows");
    if (!(params.alpha > 0.0) || params.n_iter < 1 || params.batch < 1) throw DomainError("MLP: invalid hyperparameters");
    MlpModel m = init_mlp(static_cast<std::size_t>(x.cols()), params.n_hidd, mix_seed(seed, 1));
    Rng rng(mix_seed(seed, 2));
    const auto n = static_cast<std::size_t>(x.rows());
    const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(params.batch), n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    RowMatrix xb;
    std::vector<int> yb;
    MlpModel g;
    for (int epoch = 1; epoch <= params.n_iter; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += b) {
            const std::size_t end = std::min(n, start + b);
            xb.resize(static_cast<Eigen::Index>(end - start), x.cols());
            yb.resize(end - start);
            for (std::size_t i = start; i < end; ++i) {
                xb.row(static_cast<Eigen::Index>(i - start)) = x.row(static_cast<Eigen::Index>(order[i]));
                yb[i - start] = y[order[i]];
            }
            const double loss = mlp_loss_grad(m, xb, yb, &g);
            if (!std::isfinite(loss)) throw Error("MLP: loss is not finite in epoch " + std::to_string(epoch));
            epoch_loss += loss * static_cast<double>(end - start);
            m.w1 -= params.alpha * g.w1;
            m.b1 -= params.alpha * g.b1;
            m.w2 -= params.alpha * g.w2;
            m.b2 -= params.alpha * g.b2;
        }
        if (!std::isfinite(epoch_loss)) throw Error("MLP: loss is not finite in epoch " + std::to_string(epoch));
    }
    return m;
}

// ---------------------------------------------------------------- model

int argmax(const std::array<double, 3>& p) {
    int best = 0;
    for (int c = 1; c < 3; ++c)
        if (p[static_cast<std::size_t>(c)] > p[static_cast<std::size_t>(best)]) best = c;
    return best;
}

std::array<double, 3> ClassifierModel::predict_proba(const double* row) const {
    switch (algo) {
        case Algo::GNB: {
            std::array<double, 3> ll{};
            for (std::size_t c = 0; c < 3; ++c)
                for (std::size_t f = 0; f < feature_ids.size(); ++f) {
                    GmmDensity dens(gnb.densities[c][f]);
                    ll[c] += dens.logpdf(&row[f]);
                }
            return gnb_posterior(ll);
        }
        case Algo::RF: return rf_proba(rf, row);
        case Algo::MLP: {
            RowMatrix x(1, static_cast<Eigen::Index>(feature_ids.size()));
            for (std::size_t j = 0; j < feature_ids.size(); ++j) x(0, static_cast<Eigen::Index>(j)) = row[j];
            const RowMatrix p = mlp_forward(mlp, scaler.apply(x));
            return {p(0, 0), p(0, 1), p(0, 2)};
        }
    }
    throw DomainError("unknown algorithm");
}

RowMatrix ClassifierModel::predict_proba(const RowMatrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != feature_ids.size())
        throw DomainError("classifier expects " + std::to_string(feature_ids.size()) + " features, got " +
                          std::to_string(x.cols()));
    RowMatrix out(x.rows(), 3);
    switch (algo) {
        case Algo::GNB: {
            const auto ll = gnb.feature_loglik(x);
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                const auto p = gnb_posterior({ll[0].row(i).sum(), ll[1].row(i).sum(), ll[2].row(i).sum()});
                for (Eigen::Index c = 0; c < 3; ++c) out(i, c) = p[static_cast<std::size_t>(c)];
            }
            break;
        }
        case Algo::RF: {
#pragma omp parallel for schedule(static)
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                const auto p = rf_proba(rf, x.row(i).data());
                for (Eigen::Index c = 0; c < 3; ++c) out(i, c) = p[static_cast<std::size_t>(c)];
            }
            break;
        }
        case Algo::MLP: out = mlp_forward(mlp, scaler.apply(x)); break;
    }
    return out;
}

ClassifierModel fit_classifier(Algo algo, const Hyper& params, std::vector<std::string> feature_ids,
                               const LabeledData& train, std::uint64_t seed) {
    if (static_cast<std::size_t>(train.x.cols()) != feature_ids.size())
        throw DomainError("fit_classifier: feature list does not match the data columns");
    if (feature_ids.empty()) throw DomainError("fit_classifier: empty feature set");
    std::array<std::size_t, 3> counts{};
    for (int c : train.y) ++counts[static_cast<std::size_t>(c)];
    for (std::size_t c = 0; c < 3; ++c)
        if (counts[c] == 0) throw Error("fit_classifier: class " + std::string(to_string(kManeuvers[c])) + " has no training rows");
    ClassifierModel m;
    m.algo = algo;
    m.feature_ids = std::move(feature_ids);
    m.params = params;
    switch (algo) {
        case Algo::GNB:
            m.scaler = identity_scaler(m.feature_ids.size());
            m.gnb = fit_gnb(train, params, seed);
            break;
        case Algo::RF:
            m.scaler = identity_scaler(m.feature_ids.size());
            m.rf = fit_rf(train, params, seed);
            break;
        case Algo::MLP:
            m.scaler = fit_scaler(train.x);
            m.mlp = fit_mlp(m.scaler.apply(train.x), train.y, params, seed);
            break;
    }
    return m;
}

// ---------------------------------------------------------------- serialization

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    auto j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index k = 0; k < m.cols(); ++k) row[static_cast<std::size_t>(k)] = m(i, k);
        j.push_back(row);
    }
    return j;
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
    if (static_cast<Eigen::Index>(j.size()) != rows) throw DomainError("matrix has wrong row count");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto r = j[static_cast<std::size_t>(i)].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(r.size()) != cols) throw DomainError("matrix has wrong column count");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = r[static_cast<std::size_t>(k)];
    }
    return m;
}

nlohmann::json row_json(const Eigen::RowVectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::RowVectorXd row_from(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json hyper_to_json(const Hyper& h) {
    return {{"alpha", h.alpha},   {"n_hidd", h.n_hidd}, {"n_iter", h.n_iter},       {"batch", h.batch},
            {"n_tree", h.n_tree}, {"n_splt", h.n_splt}, {"n_smpl", h.n_smpl},       {"gnb_k_max", h.gnb_k_max},
            {"gnb_restarts", h.gnb_restarts},           {"gnb_max_rows", h.gnb_max_rows}};
}

nlohmann::json classifier_to_json(const ClassifierModel& m) {
    nlohmann::json j;
    j["algo"] = to_string(m.algo);
    j["features"] = m.feature_ids;
    j["params"] = hyper_to_json(m.params);
    j["scaler"] = {{"mean", m.scaler.mean}, {"scale", m.scaler.scale}, {"passthrough", m.scaler.passthrough}};
    switch (m.algo) {
        case Algo::GNB: {
            auto classes = nlohmann::json::array();
            for (const auto& per_class : m.gnb.densities) {
                auto feats = nlohmann::json::array();
                for (const auto& g : per_class) feats.push_back(gmm_to_json(g));
                classes.push_back(feats);
            }
            j["gnb"] = classes;
            break;
        }
        case Algo::RF: {
            auto trees = nlohmann::json::array();
            for (const auto& t : m.rf.trees) {
                auto nodes = nlohmann::json::array();
                for (const auto& n : t)
                    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.proba[0], n.proba[1], n.proba[2]});
                trees.push_back(nodes);
            }
            j["rf"] = trees;
            break;
        }
        case Algo::MLP:
            j["mlp"] = {{"w1", matrix_json(m.mlp.w1)}, {"b1", row_json(m.mlp.b1)},
                        {"w2", matrix_json(m.mlp.w2)}, {"b2", row_json(m.mlp.b2)}};
            break;
    }
    return j;
}

ClassifierModel classifier_from_json(const nlohmann::json& j) {
    ClassifierModel m;
    try {
        m.algo = parse_algo(j.at("algo").get<std::string>());
        m.feature_ids = j.at("features").get<std::vector<std::string>>();
        const auto& p = j.at("params");
        m.params.alpha = p.at("alpha");
        m.params.n_hidd = p.at("n_hidd");
        m.params.n_iter = p.at("n_iter");
        m.params.batch = p.at("batch");
        m.params.n_tree = p.at("n_tree");
        m.params.n_splt = p.at("n_splt");
        m.params.n_smpl = p.at("n_smpl");
        m.params.gnb_k_max = p.at("gnb_k_max");
        m.params.gnb_restarts = p.at("gnb_restarts");
        m.params.gnb_max_rows = p.at("gnb_max_rows");
        m.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
        m.scaler.scale = j.at("scaler").at("scale").get<std::vector<double>>();
        m.scaler.passthrough = j.at("scaler").at("passthrough").get<std::vector<std::size_t>>();
        const auto nf = static_cast<Eigen::Index>(m.feature_ids.size());
        switch (m.algo) {
            case Algo::GNB:
                for (std::size_t c = 0; c < 3; ++c)
                    for (const auto& g : j.at("gnb").at(c)) m.gnb.densities[c].push_back(gmm_from_json(g));
                break;
            case Algo::RF:
                for (const auto& t : j.at("rf")) {
                    std::vector<TreeNode> nodes;
                    for (const auto& n : t) {
                        TreeNode node;
                        node.feature = n.at(0);
                        node.threshold = n.at(1);
                        node.left = n.at(2);
                        node.right = n.at(3);
                        node.proba = {n.at(4).get<double>(), n.at(5).get<double>(), n.at(6).get<double>()};
                        nodes.push_back(node);
                    }
                    m.rf.trees.push_back(std::move(nodes));
                }
                break;
            case Algo::MLP: {
                const auto& mj = j.at("mlp");
                const auto h = static_cast<Eigen::Index>(mj.at("b1").size());
                m.mlp.w1 = matrix_from(mj.at("w1"), nf, h);
                m.mlp.b1 = row_from(mj.at("b1"));
                m.mlp.w2 = matrix_from(mj.at("w2"), h, 3);
                m.mlp.b2 = row_from(mj.at("b2"));
                break;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("classifier model: ") + e.what());
    }
    return m;
}

// ---------------------------------------------------------------- grid search

bool smaller_model(Algo algo, const Hyper& a, const Hyper& b) {
    switch (algo) {
        case Algo::MLP:
            return std::tie(a.n_hidd, a.n_iter, a.alpha) < std::tie(b.n_hidd, b.n_iter, b.alpha);
        case Algo::RF: {
            const int sa = -a.n_smpl, sb = -b.n_smpl;
            return std::tie(a.n_tree, a.n_splt, sa) < std::tie(b.n_tree, b.n_splt, sb);
        }
        case Algo::GNB: return a.gnb_k_max < b.gnb_k_max;
    }
    return false;
}

GridResult grid_search(Algo algo, std::vector<Hyper> cells, const std::vector<LabeledData>& folds,
                       std::uint64_t seed, bool evaluate_single, std::size_t max_rotations) {
    if (cells.empty()) throw DomainError("grid_search: empty grid");
    if (folds.size() < 2) throw DomainError("grid_search: needs at least two folds");
    std::stable_sort(cells.begin(), cells.end(), [algo](const Hyper& a, const Hyper& b) { return smaller_model(algo, a, b); });
    GridResult res;
    res.cells = cells;
    if (cells.size() == 1 && !evaluate_single) {
        // nothing to compare, skip the cross-validation
        res.best = cells.front();
        res.scores.push_back(std::numeric_limits<double>::quiet_NaN());
        return res;
    }
    std::vector<std::string> ids(static_cast<std::size_t>(folds.front().x.cols()));
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = "c" + std::to_string(i);
    const std::size_t rotations = max_rotations == 0 ? folds.size() : std::min(max_rotations, folds.size());
    double best = -1.0;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        double sum = 0.0;
        for (std::size_t v = 0; v < rotations; ++v) {
            std::vector<const LabeledData*> parts;
            for (std::size_t f = 0; f < folds.size(); ++f)
                if (f != v) parts.push_back(&folds[f]);
            const LabeledData train = concat(parts);
            const auto model = fit_classifier(algo, cells[ci], ids, train, mix_seed(seed, ci * 31 + v));
            const RowMatrix p = model.predict_proba(folds[v].x);
            std::vector<int> pred(folds[v].size());
            for (Eigen::Index i = 0; i < p.rows(); ++i) pred[static_cast<std::size_t>(i)] = argmax({p(i, 0), p(i, 1), p(i, 2)});
            sum += eval::bacc(eval::confusion(folds[v].y, pred));
        }
        const double score = sum / static_cast<double>(rotations);
        res.scores.push_back(score);
        if (score > best) {
            best = score;
            res.best = cells[ci];
        }
    }
    return res;
}

}  // namespace bpred::learn
