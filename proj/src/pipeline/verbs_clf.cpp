#include <cmath>
#include <limits>
#include <ostream>

#include "bpred/eval/metrics.hpp"
#include "bpred/featsel/featsel.hpp"
#include "internal.hpp"
#include "verbs.hpp"

namespace bpred::pipeline::verbs {

using namespace detail;
using learn::Algo;

namespace {

std::uint64_t algo_key(Algo a) { return static_cast<std::uint64_t>(a); }

featsel::CorrelationData correlation_data(const Dataset& ds, const std::vector<prep::SampleRef>& refs) {
    featsel::CorrelationData c;
    c.x = design(ds, refs, all_columns(ds.catalog)).x;
    c.target.reserve(refs.size());
    for (const auto& r : refs) {
        const auto& smp = ds.situations[r.situation].samples[r.sample];
        c.target.push_back(featsel::ttlc_target(smp.ttlcl, smp.ttlcr));
    }
    return c;
}

std::vector<prep::SampleRef> joined(const std::vector<std::vector<prep::SampleRef>>& folds, std::size_t n) {
    std::vector<prep::SampleRef> out;
    for (std::size_t f = 0; f < n; ++f) out.insert(out.end(), folds[f].begin(), folds[f].end());
    return out;
}

std::vector<learn::LabeledData> fold_designs(const Dataset& ds, const std::vector<std::vector<prep::SampleRef>>& folds,
                                             std::size_t n, const std::vector<std::size_t>& cols) {
    std::vector<learn::LabeledData> out;
    for (std::size_t f = 0; f < n; ++f) out.push_back(design(ds, folds[f], cols));
    return out;
}

nlohmann::json grid_json(const learn::GridResult& g) {
    auto cells = nlohmann::json::array();
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        auto c = learn::hyper_to_json(g.cells[i]);
        const double sc = i < g.scores.size() ? g.scores[i] : std::numeric_limits<double>::quiet_NaN();
        c["cv_bacc"] = std::isfinite(sc) ? nlohmann::json(sc) : nlohmann::json();
        cells.push_back(c);
    }
    return cells;
}

double best_score(const learn::GridResult& g) {
    for (std::size_t i = 0; i < g.cells.size(); ++i)
        if (g.cells[i] == g.best) return g.scores[i];
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void select(const Settings& s, std::ostream& out) {
    const Dataset ds = load_labeled(s);
    const auto sp = load_split(s, ds);
    const auto& folds = sp.folds.folds;
    const std::size_t n_tv = folds.size() - 1;
    const Catalog& cat = ds.catalog;

    const auto a = featsel::superset(cat);
    const auto b = featsel::select_by_threshold(correlation_data(ds, joined(folds, n_tv)), cat, s.select.theta);
    std::vector<featsel::FoldCorrelations> fc;
    for (std::size_t f = 0; f < n_tv; ++f) fc.push_back(featsel::fold_correlations(correlation_data(ds, folds[f])));
    const auto c = featsel::cfs_backward_select(fc, cat);
    write_json(feature_file(s, 'A', Algo::GNB), featsel::to_json(a));
    write_json(feature_file(s, 'B', Algo::GNB), featsel::to_json(b));
    write_json(feature_file(s, 'C', Algo::GNB), featsel::to_json(c));

    std::string line = "select: " + std::to_string(cat.size()) + " features -> A=" + std::to_string(a.ids.size()) +
                       " B=" + std::to_string(b.ids.size()) + " C=" + std::to_string(c.ids.size());
    const auto& start = s.select.wrapper_start == 'A' ? a : s.select.wrapper_start == 'B' ? b : c;
    const auto all = all_columns(cat);
    const auto train = design(ds, folds[static_cast<std::size_t>(s.select.wrapper_train_fold - 1)], all);
    const auto val = design(ds, folds[static_cast<std::size_t>(s.select.wrapper_val_fold - 1)], all);
    for (Algo algo : s.select.wrapper_algos) {
        // hyperparameters come from a grid search on the CFS set
        const auto g = learn::grid_search(algo, s.clf.grid.at(algo), fold_designs(ds, folds, n_tv, cat.indices(c.ids)),
                                          mix_seed(s.select.seed, 10 + algo_key(algo)), false, s.clf.cv_rotations);
        featsel::WrapperConfig wc;
        wc.max_train_rows = s.select.wrapper_max_rows;
        wc.seed = mix_seed(s.select.seed, 20 + algo_key(algo));
        auto d = featsel::wrapper_backward_select(algo, g.best, train, val, cat, start.ids, wc);
        d.provenance["start_variant"] = std::string(1, s.select.wrapper_start);
        d.provenance["params"] = learn::hyper_to_json(g.best);
        d.provenance["grid"] = grid_json(g);
        write_json(feature_file(s, 'D', algo), featsel::to_json(d));
        line += " D_" + learn::to_string(algo) + "=" + std::to_string(d.ids.size());
    }
    out << line << '\n';
}

void train_clf(const Settings& s, std::ostream& out) {
    const Dataset ds = load_labeled(s);
    const auto sp = load_split(s, ds);
    const auto& folds = sp.folds.folds;
    const std::size_t n_tv = folds.size() - 1;
    const Catalog& cat = ds.catalog;

    nlohmann::json selection = nlohmann::json::object();
    std::string line = "train-clf:";
    std::size_t train_rows = 0;
    for (Algo algo : s.clf.algos) {
        const auto& variants = s.clf.variants.at(algo);
        const bool compare = variants.size() > 1;
        char best_variant = variants.front();
        learn::Hyper best_hyper;
        double best = -1.0;
        std::vector<std::string> best_ids;
        nlohmann::json per_variant = nlohmann::json::object();
        for (char v : variants) {
            const auto fs = load_feature_set(s, v, algo);
            const auto g = learn::grid_search(algo, s.clf.grid.at(algo),
                                              fold_designs(ds, folds, n_tv, cat.indices(fs.ids)),
                                              mix_seed(s.clf.seed, algo_key(algo) * 100 + static_cast<std::uint64_t>(v)),
                                              compare, s.clf.cv_rotations);
            const double score = best_score(g);
            nlohmann::json entry;
            entry["features"] = fs.ids;
            entry["grid"] = grid_json(g);
            entry["cv_bacc"] = std::isfinite(score) ? nlohmann::json(score) : nlohmann::json();
            per_variant[std::string(1, v)] = entry;
            // ties keep the variant listed first
            if (!compare || score > best) {
                best = score;
                best_variant = v;
                best_hyper = g.best;
                best_ids = fs.ids;
            }
        }
        const auto tv = design(ds, joined(folds, n_tv), cat.indices(best_ids));
        train_rows = tv.size();
        const auto model = learn::fit_classifier(algo, best_hyper, best_ids, tv, mix_seed(s.clf.seed, 1000 + algo_key(algo)));
        write_json(classifier_file(s, learn::to_string(algo)), learn::classifier_to_json(model));
        selection[learn::to_string(algo)] = {{"variant", std::string(1, best_variant)},
                                             {"params", learn::hyper_to_json(best_hyper)},
                                             {"train_rows", tv.size()},
                                             {"variants", per_variant}};
        line += " " + learn::to_string(algo) + "=" + std::string(1, best_variant) + "/" +
                std::to_string(best_ids.size()) + (compare ? " (cv bacc " + fixed(best) + ")" : "");
    }
    write_json(s.paths.models() / "clf_selection.json", selection);
    out << line << "; " << train_rows << " training rows\n";
}

namespace {

nlohmann::json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

struct Crossing {
    int maneuver = -1;
    double t_x = 0.0;
};

// First marking crossing of a situation, from the labeled samples.
Crossing first_crossing(const Situation& sit) {
    Crossing c;
    double best = kInf;
    for (const auto& smp : sit.samples) {
        if (smp.label == Maneuver::FLW) continue;
        const double ttl = smp.label == Maneuver::LCL ? smp.ttlcl : smp.ttlcr;
        if (smp.t_rec + ttl < best) {
            best = smp.t_rec + ttl;
            c.maneuver = static_cast<int>(index_of(smp.label));
        }
    }
    // crossing time sits on the frame grid
    if (c.maneuver >= 0) c.t_x = frame_time(frame_index(best));
    return c;
}

}  // namespace

void eval_clf(const Settings& s, std::ostream& out) {
    const Dataset ds = load_labeled(s);
    const auto sp = load_split(s, ds);
    const auto& folds = sp.folds.folds;
    const int test_fold = static_cast<int>(folds.size());
    const Catalog& cat = ds.catalog;
    const double cap = s.horizon.horizon;

    nlohmann::json metrics;
    metrics["classifiers"] = nlohmann::json::object();
    std::string line = "eval-clf: " + std::to_string(folds.back().size()) + " test rows;";
    for (Algo algo : s.clf.algos) {
        const auto name = learn::to_string(algo);
        const auto model = load_classifier(s, name);
        const auto cols = cat.indices(model.feature_ids);
        const auto test = design(ds, folds.back(), cols);
        const learn::RowMatrix p = model.predict_proba(test.x);
        std::vector<int> pred(test.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            pred[i] = learn::argmax({p(r, 0), p(r, 1), p(r, 2)});
        }
        const auto conf = eval::confusion(test.y, pred);
        const double bacc = eval::bacc(conf);

        nlohmann::json j;
        j["features"] = model.feature_ids;
        j["bacc"] = bacc;
        j["confusion"] = conf;
        std::array<double, 3> thr{};
        auto rocs = nlohmann::json::array();
        std::vector<double> aucs;
        for (int m = 0; m < 3; ++m) {
            std::vector<double> score(test.size());
            std::vector<int> pos(test.size());
            for (std::size_t i = 0; i < score.size(); ++i) {
                score[i] = p(static_cast<Eigen::Index>(i), m);
                pos[i] = test.y[i] == m ? 1 : 0;
            }
            const auto roc = eval::roc_auc(score, pos);
            thr[static_cast<std::size_t>(m)] = eval::working_point(roc.curve, s.clf.fpr_max);
            aucs.push_back(roc.auc);
            auto pts = nlohmann::json::array();
            for (const auto& pt : roc.curve.points) pts.push_back({finite_or_string(pt.threshold), pt.fpr, pt.tpr});
            rocs.push_back({{"maneuver", to_string(kManeuvers[static_cast<std::size_t>(m)])},
                            {"auc", roc.auc},
                            {"threshold", finite_or_string(thr[static_cast<std::size_t>(m)])},
                            {"points", pts}});
        }
        j["auc"] = aucs;
        j["roc"] = rocs;

        // detection times over the lane change situations of the test fold
        auto taus = nlohmann::json::array();
        std::size_t skipped = 0;
        std::array<double, 3> sum_f{}, sum_c{};
        std::array<std::size_t, 3> n{}, ordered{};
        for (const auto& sit : ds.situations) {
            const auto it = sp.folds.fold_of.find(sit.situation_id);
            if (it == sp.folds.fold_of.end() || it->second != test_fold) continue;
            const auto cr = first_crossing(sit);
            if (cr.maneuver < 0) continue;
            if (sit.samples.empty() || sit.samples.front().t_rec > cr.t_x - cap + 1e-9) {
                ++skipped;
                continue;
            }
            std::vector<double> times;
            std::vector<bool> detected;
            std::vector<double> row(cols.size());
            for (const auto& smp : sit.samples) {
                if (smp.t_rec < cr.t_x - cap - 1e-9 || smp.t_rec >= cr.t_x - 1e-9) continue;
                for (std::size_t c = 0; c < cols.size(); ++c) row[c] = smp.features[cols[c]];
                const auto pr = model.predict_proba(row.data());
                times.push_back(smp.t_rec);
                detected.push_back(pr[static_cast<std::size_t>(cr.maneuver)] >= thr[static_cast<std::size_t>(cr.maneuver)]);
            }
            const auto d = eval::detection_times(times, detected, cr.t_x, cap);
            const auto m = static_cast<std::size_t>(cr.maneuver);
            sum_f[m] += d.tau_f;
            sum_c[m] += d.tau_c;
            ++n[m];
            if (d.tau_c <= d.tau_f + 1e-12) ++ordered[m];
            taus.push_back({{"situation_id", sit.situation_id},
                            {"maneuver", to_string(kManeuvers[m])},
                            {"t_x", cr.t_x},
                            {"tau_f", d.tau_f},
                            {"tau_c", d.tau_c}});
        }
        j["tau"] = taus;
        j["tau_skipped"] = skipped;
        nlohmann::json summary = nlohmann::json::object();
        for (std::size_t m : {std::size_t{0}, std::size_t{2}}) {
            const double dn = static_cast<double>(n[m]);
            summary[std::string(to_string(kManeuvers[m]))] = {
                {"n", n[m]},
                {"mean_tau_f", n[m] ? nlohmann::json(sum_f[m] / dn) : nlohmann::json()},
                {"mean_tau_c", n[m] ? nlohmann::json(sum_c[m] / dn) : nlohmann::json()},
                {"fraction_c_le_f", n[m] ? nlohmann::json(static_cast<double>(ordered[m]) / dn) : nlohmann::json()}};
        }
        j["tau_summary"] = summary;
        metrics["classifiers"][name] = j;
        line += " " + name + " bacc " + fixed(bacc) + " auc " + fixed(aucs[0]) + "/" + fixed(aucs[1]) + "/" +
                fixed(aucs[2]);
        if (n[0]) line += " tau_f(LCL) " + fixed(sum_f[0] / static_cast<double>(n[0]), 2) + "s";
        line += ";";
    }
    metrics["fpr_max"] = s.clf.fpr_max;
    metrics["horizon"] = cap;
    write_json(s.paths.metrics() / "clf_metrics.json", metrics);
    line.pop_back();
    out << line << '\n';
}

}  // namespace bpred::pipeline::verbs
