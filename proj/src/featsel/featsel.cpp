#include "bpred/featsel/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bpred/core/rng.hpp"
#include "bpred/core/stats.hpp"
#include "bpred/eval/metrics.hpp"

namespace bpred::featsel {

using learn::RowMatrix;

nlohmann::json to_json(const FeatureSet& fs) {
    return {{"variant", std::string(1, fs.variant)}, {"ids", fs.ids}, {"provenance", fs.provenance}};
}

FeatureSet feature_set_from_json(const nlohmann::json& j) {
    FeatureSet fs;
    try {
        const auto v = j.at("variant").get<std::string>();
        if (v.size() != 1 || v[0] < 'A' || v[0] > 'D') throw DomainError("feature set variant must be one of A-D");
        fs.variant = v[0];
        fs.ids = j.at("ids").get<std::vector<std::string>>();
        if (j.contains("provenance")) fs.provenance = j.at("provenance");
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("feature set: ") + e.what());
    }
    return fs;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("spearman: inputs differ in length");
    return pearson(average_ranks(x), average_ranks(y));
}

double ttlc_target(double ttlcl, double ttlcr, double cap) { return std::min({ttlcl, ttlcr, cap}); }

bool is_constant(const RowMatrix& x, Eigen::Index j) {
    if (x.rows() == 0) return true;
    const double v0 = x(0, j);
    for (Eigen::Index i = 1; i < x.rows(); ++i)
        if (x(i, j) != v0) return false;
    return true;
}

FeatureSet superset(const Catalog& catalog) {
    FeatureSet fs;
    fs.variant = 'A';
    fs.ids = catalog.ids();
    fs.provenance = {{"technique", "superset"}};
    return fs;
}

namespace {

std::vector<double> column(const RowMatrix& x, Eigen::Index j) {
    std::vector<double> c(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) c[static_cast<std::size_t>(i)] = x(i, j);
    return c;
}

void check_shape(const CorrelationData& data, const Catalog& catalog) {
    if (static_cast<std::size_t>(data.x.cols()) != catalog.size())
        throw DomainError("correlation data has " + std::to_string(data.x.cols()) + " columns, catalog has " +
                          std::to_string(catalog.size()));
    if (static_cast<std::size_t>(data.x.rows()) != data.target.size())
        throw DomainError("correlation data: target length differs from row count");
    if (data.target.size() < 2) throw DomainError("correlation data needs at least two rows");
}

}  // namespace

FeatureSet select_by_threshold(const CorrelationData& data, const Catalog& catalog, double theta) {
    check_shape(data, catalog);
    const std::size_t p = catalog.size();
    const auto target_ranks = average_ranks(data.target);
    std::vector<double> rho(p, std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(p); ++j) {
        if (is_constant(data.x, j)) continue;
        rho[static_cast<std::size_t>(j)] = pearson(average_ranks(column(data.x, j)), target_ranks);
    }
    FeatureSet fs;
    fs.variant = 'B';
    nlohmann::json corr = nlohmann::json::object();
    for (std::size_t j = 0; j < p; ++j) {
        if (std::isnan(rho[j])) continue;
        corr[catalog[j].id] = rho[j];
        if (std::abs(rho[j]) >= theta) fs.ids.push_back(catalog[j].id);
    }
    if (fs.ids.empty())
        throw Error("no feature reaches |rho| >= " + std::to_string(theta) + " against TTLC; lower the threshold");
    fs.provenance = {{"technique", "correlation threshold"}, {"theta", theta}, {"target", "ttlc"}, {"rho", corr}};
    return fs;
}

double cfs_merit(std::size_t n, double mean_cf, double mean_ff) {
    if (n == 0) throw DomainError("merit of an empty feature set");
    const double nn = static_cast<double>(n);
    const double radicand = nn + nn * (nn - 1.0) * mean_ff;
    if (!(radicand > 0.0)) throw DomainError("merit undefined: mean inter-correlation below -1/(n-1)");
    return nn * mean_cf / std::sqrt(radicand);
}

double cfs_merit(const std::vector<std::size_t>& members, const std::vector<double>& rho_cf,
                 const std::vector<std::vector<double>>& rho_ff) {
    const std::size_t n = members.size();
    if (n == 0) throw DomainError("merit of an empty feature set");
    double cf = 0.0, ff = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        cf += std::abs(rho_cf[members[a]]);
        for (std::size_t b = a + 1; b < n; ++b) ff += std::abs(rho_ff[members[a]][members[b]]);
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return cfs_merit(n, cf / static_cast<double>(n), pairs > 0.0 ? ff / pairs : 0.0);
}

FoldCorrelations fold_correlations(const CorrelationData& data) {
    const auto p = static_cast<std::size_t>(data.x.cols());
    if (static_cast<std::size_t>(data.x.rows()) != data.target.size())
        throw DomainError("correlation data: target length differs from row count");
    FoldCorrelations out;
    out.cf.assign(p, 0.0);
    out.ff.assign(p, std::vector<double>(p, 0.0));
    std::vector<std::vector<double>> ranks(p);
    auto& constant = out.constant;
    constant.assign(p, 0);
    const auto target_ranks = average_ranks(data.target);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(p); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        constant[jj] = is_constant(data.x, j);
        if (constant[jj]) continue;
        ranks[jj] = average_ranks(column(data.x, j));
        out.cf[jj] = std::abs(pearson(ranks[jj], target_ranks));
    }
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(p); ++a) {
        const auto aa = static_cast<std::size_t>(a);
        out.ff[aa][aa] = 1.0;
        if (constant[aa]) continue;
        for (std::size_t b = aa + 1; b < p; ++b) {
            if (constant[b]) continue;
            out.ff[aa][b] = std::abs(pearson(ranks[aa], ranks[b]));
        }
    }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b) out.ff[b][a] = out.ff[a][b];
    return out;
}

namespace {

bool constant_in_all(const std::vector<FoldCorrelations>& folds, std::size_t j) {
    for (const auto& f : folds)
        if (!f.constant[j]) return false;
    return true;
}

double mean_merit(const std::vector<FoldCorrelations>& folds, const std::vector<std::size_t>& members) {
    double s = 0.0;
    for (const auto& f : folds) s += cfs_merit(members, f.cf, f.ff);
    return s / static_cast<double>(folds.size());
}

}  // namespace

FeatureSet cfs_backward_select(const std::vector<FoldCorrelations>& folds, const Catalog& catalog) {
    if (folds.empty()) throw DomainError("CFS needs at least one fold");
    const std::size_t p = catalog.size();
    for (const auto& f : folds)
        if (f.cf.size() != p || f.ff.size() != p || f.constant.size() != p) throw DomainError("fold correlations do not match the catalog");
    std::vector<std::size_t> current;
    for (std::size_t j = 0; j < p; ++j)
        if (!constant_in_all(folds, j)) current.push_back(j);
    if (current.size() < 2) throw DomainError("CFS needs at least two non-constant features");

    double merit = mean_merit(folds, current);
    nlohmann::json trace = nlohmann::json::array();
    while (current.size() > 1) {
        std::vector<double> scores(current.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(current.size()); ++r) {
            std::vector<std::size_t> cand;
            cand.reserve(current.size() - 1);
            for (std::size_t k = 0; k < current.size(); ++k)
                if (k != static_cast<std::size_t>(r)) cand.push_back(current[k]);
            scores[static_cast<std::size_t>(r)] = mean_merit(folds, cand);
        }
        // current is in catalog order, so the first maximum has the lower index
        const auto best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
        if (scores[best] < merit) break;
        trace.push_back({{"removed", catalog[current[best]].id}, {"merit", scores[best]}});
        merit = scores[best];
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(best));
    }
    FeatureSet fs;
    fs.variant = 'C';
    for (auto j : current) fs.ids.push_back(catalog[j].id);
    fs.provenance = {{"technique", "cfs backward elimination"}, {"folds", folds.size()}, {"merit", merit},
                     {"target", "ttlc"}, {"trace", trace}};
    return fs;
}

namespace {

double bacc_of(const RowMatrix& proba, const std::vector<int>& truth) {
    std::vector<int> pred(truth.size());
    for (Eigen::Index i = 0; i < proba.rows(); ++i)
        pred[static_cast<std::size_t>(i)] = learn::argmax({proba(i, 0), proba(i, 1), proba(i, 2)});
    return eval::bacc(eval::confusion(truth, pred));
}

// Scores feature subsets of the start set. GNB factorizes over features, so its
// per-feature densities are fitted once and subsets only sum log likelihoods.
class SubsetScorer {
public:
    SubsetScorer(learn::Algo algo, const learn::Hyper& params, const learn::LabeledData& train,
                 const learn::LabeledData& val, const Catalog& catalog, std::vector<std::size_t> start,
                 std::uint64_t seed)
        : algo_(algo), params_(params), train_(train), val_(val), catalog_(catalog), start_(std::move(start)),
          seed_(seed) {
        if (algo_ == learn::Algo::GNB) {
            const auto sub = learn::select_columns(train_, start_);
            const auto gnb = learn::fit_gnb(sub, params_, seed_);
            val_loglik_ = gnb.feature_loglik(learn::select_columns(val_, start_).x);
        }
    }

    // `members` are positions within the start set
    double score(const std::vector<std::size_t>& members) const {
        if (algo_ == learn::Algo::GNB) {
            RowMatrix proba(val_.x.rows(), 3);
            for (Eigen::Index i = 0; i < proba.rows(); ++i) {
                std::array<double, 3> ll{};
                for (std::size_t c = 0; c < 3; ++c)
                    for (auto m : members) ll[c] += val_loglik_[c](i, static_cast<Eigen::Index>(m));
                const auto p = learn::gnb_posterior(ll);
                for (Eigen::Index c = 0; c < 3; ++c) proba(i, c) = p[static_cast<std::size_t>(c)];
            }
            return bacc_of(proba, val_.y);
        }
        std::vector<std::size_t> cols;
        std::vector<std::string> ids;
        for (auto m : members) {
            cols.push_back(start_[m]);
            ids.push_back(catalog_[start_[m]].id);
        }
        try {
            const auto model =
                learn::fit_classifier(algo_, params_, ids, learn::select_columns(train_, cols), seed_);
            return bacc_of(model.predict_proba(learn::select_columns(val_, cols).x), val_.y);
        } catch (const Error& e) {
            std::string list;
            for (const auto& id : ids) list += (list.empty() ? "" : ",") + id;
            throw Error(std::string(e.what()) + " (wrapper feature set: " + list + ")");
        }
    }

private:
    learn::Algo algo_;
    learn::Hyper params_;
    const learn::LabeledData& train_;
    const learn::LabeledData& val_;
    const Catalog& catalog_;
    std::vector<std::size_t> start_;
    std::uint64_t seed_;
    std::array<RowMatrix, 3> val_loglik_;
};

}  // namespace

FeatureSet wrapper_backward_select(learn::Algo algo, const learn::Hyper& params, const learn::LabeledData& train,
                                   const learn::LabeledData& val, const Catalog& catalog,
                                   const std::vector<std::string>& start, const WrapperConfig& cfg) {
    if (static_cast<std::size_t>(train.x.cols()) != catalog.size() ||
        static_cast<std::size_t>(val.x.cols()) != catalog.size())
        throw DomainError("wrapper data must carry every catalog column");
    if (start.empty()) throw DomainError("wrapper start set is empty");
    auto start_cols = catalog.indices(start);
    std::sort(start_cols.begin(), start_cols.end());
    start_cols.erase(std::unique(start_cols.begin(), start_cols.end()), start_cols.end());

    const learn::LabeledData train_rows =
        cfg.max_train_rows > 0 ? learn::subsample(train, cfg.max_train_rows, mix_seed(cfg.seed, 7)) : train;
    const SubsetScorer scorer(algo, params, train_rows, val, catalog, start_cols, cfg.seed);

    std::vector<std::size_t> current(start_cols.size());
    for (std::size_t k = 0; k < current.size(); ++k) current[k] = k;
    double score = scorer.score(current);
    nlohmann::json trace = nlohmann::json::array();
    trace.push_back({{"removed", nullptr}, {"bacc", score}});
    while (current.size() > 1) {
        std::vector<double> scores(current.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(current.size()); ++r) {
            std::vector<std::size_t> cand;
            for (std::size_t k = 0; k < current.size(); ++k)
                if (k != static_cast<std::size_t>(r)) cand.push_back(current[k]);
            scores[static_cast<std::size_t>(r)] = scorer.score(cand);
        }
        const auto best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
        if (scores[best] < score) break;
        trace.push_back({{"removed", catalog[start_cols[current[best]]].id}, {"bacc", scores[best]}});
        score = scores[best];
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(best));
    }
    FeatureSet fs;
    fs.variant = 'D';
    for (auto k : current) fs.ids.push_back(catalog[start_cols[k]].id);
    fs.provenance = {{"technique", "wrapper backward elimination"},
                     {"classifier", learn::to_string(algo)},
                     {"train_rows", train_rows.size()},
                     {"val_rows", val.size()},
                     {"bacc", score},
                     {"start", start},
                     {"trace", trace}};
    return fs;
}

}  // namespace bpred::featsel
