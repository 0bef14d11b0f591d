#include <algorithm>

#include "bpred/pipeline/pipeline.hpp"

namespace bpred::pipeline {

namespace {

std::size_t count(const Config& c, const std::string& key, long long fallback, long long min = 0) {
    const auto v = c.integer(key, fallback);
    if (v < min) throw ConfigError(key, "config key '" + key + "' must be at least " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

double fraction(const Config& c, const std::string& key, double fallback) {
    const double v = c.num(key, fallback);
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "config key '" + key + "' must lie in [0, 1]");
    return v;
}

learn::Algo algo_of(const std::string& key, const std::string& name) {
    try {
        return learn::parse_algo(name);
    } catch (const DomainError&) {
        throw ConfigError(key, "config key '" + key + "' names an unknown classifier '" + name + "'");
    }
}

std::vector<learn::Algo> algo_list(const Config& c, const std::string& key, const std::vector<std::string>& fallback) {
    std::vector<learn::Algo> out;
    for (const auto& n : c.list(key, fallback)) out.push_back(algo_of(key, n));
    if (out.empty()) throw ConfigError(key, "config key '" + key + "' is empty");
    return out;
}

char variant_of(const std::string& key, const std::string& v) {
    if (v.size() != 1 || v[0] < 'A' || v[0] > 'D')
        throw ConfigError(key, "config key '" + key + "' holds an unknown feature variant '" + v + "'");
    return v[0];
}

predict::Strategy strategy_of(const Config& c, const std::string& key, predict::Strategy fallback) {
    if (!c.has(key)) return fallback;
    try {
        return predict::parse_strategy(c.str(key));
    } catch (const DomainError&) {
        throw ConfigError(key, "config key '" + key + "' names an unknown strategy '" + c.str(key) + "'");
    }
}

template <class T, class Apply>
void expand(std::vector<learn::Hyper>& cells, const std::vector<T>& values, Apply apply) {
    std::vector<learn::Hyper> out;
    for (const auto& h : cells)
        for (const auto& v : values) {
            learn::Hyper g = h;
            apply(g, v);
            out.push_back(g);
        }
    cells = std::move(out);
}

std::vector<int> ints(const Config& c, const std::string& key, int fallback, int min) {
    std::vector<int> out;
    for (auto v : c.int_list(key, {fallback})) {
        if (v < min) throw ConfigError(key, "config key '" + key + "' must be at least " + std::to_string(min));
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw ConfigError(key, "config key '" + key + "' is empty");
    return out;
}

std::vector<learn::Hyper> grid_of(const Config& c, learn::Algo a) {
    const learn::Hyper d;
    std::vector<learn::Hyper> cells{d};
    const std::string p = "clf." + learn::to_string(a) + ".";
    switch (a) {
        case learn::Algo::MLP: {
            const auto alpha = c.num_list(p + "alpha", {d.alpha});
            for (double v : alpha)
                if (!(v > 0.0)) throw ConfigError(p + "alpha", "config key '" + p + "alpha' must be positive");
            expand(cells, alpha, [](learn::Hyper& h, double v) { h.alpha = v; });
            expand(cells, ints(c, p + "n_hidd", d.n_hidd, 1), [](learn::Hyper& h, int v) { h.n_hidd = v; });
            expand(cells, ints(c, p + "n_iter", d.n_iter, 1), [](learn::Hyper& h, int v) { h.n_iter = v; });
            expand(cells, ints(c, p + "batch", d.batch, 1), [](learn::Hyper& h, int v) { h.batch = v; });
            break;
        }
        case learn::Algo::RF:
            expand(cells, ints(c, p + "n_tree", d.n_tree, 1), [](learn::Hyper& h, int v) { h.n_tree = v; });
            expand(cells, ints(c, p + "n_splt", d.n_splt, 1), [](learn::Hyper& h, int v) { h.n_splt = v; });
            expand(cells, ints(c, p + "n_smpl", d.n_smpl, 2), [](learn::Hyper& h, int v) { h.n_smpl = v; });
            break;
        case learn::Algo::GNB:
            expand(cells, ints(c, p + "k_max", d.gnb_k_max, 1), [](learn::Hyper& h, int v) { h.gnb_k_max = v; });
            expand(cells, ints(c, p + "restarts", d.gnb_restarts, 1), [](learn::Hyper& h, int v) { h.gnb_restarts = v; });
            expand(cells, ints(c, p + "max_rows", d.gnb_max_rows, 10), [](learn::Hyper& h, int v) { h.gnb_max_rows = v; });
            break;
    }
    return cells;
}

}  // namespace

Settings load_settings(const Config& c) {
    Settings s;
    s.paths.work = c.str("paths.work");

    auto& sim = s.sim;
    sim.rng_seed = c.seed("sim.seed");
    sim.n_situations = count(c, "sim.n_situations", static_cast<long long>(sim.n_situations), 1);
    sim.duration_s = c.num("sim.duration_s", sim.duration_s);
    sim.horizon_s = c.num("prep.horizon", sim.horizon_s);
    sim.lane_width = c.num("sim.lane_width", sim.lane_width);
    sim.n_lanes = static_cast<int>(c.integer("sim.n_lanes", sim.n_lanes));
    sim.lane_change_rate = fraction(c, "sim.lane_change_rate", sim.lane_change_rate);
    sim.lcl_duration_min = c.num("sim.lcl_duration_min", sim.lcl_duration_min);
    sim.lcl_duration_max = c.num("sim.lcl_duration_max", sim.lcl_duration_max);
    sim.lcr_duration_min = c.num("sim.lcr_duration_min", sim.lcr_duration_min);
    sim.lcr_duration_max = c.num("sim.lcr_duration_max", sim.lcr_duration_max);
    sim.speed_min = c.num("sim.speed_min", sim.speed_min);
    sim.speed_max = c.num("sim.speed_max", sim.speed_max);
    sim.neighbor_rate = fraction(c, "sim.neighbor_rate", sim.neighbor_rate);
    sim.lk_sigma = c.num("sim.lk_sigma", sim.lk_sigma);
    sim.lk_period = c.num("sim.lk_period", sim.lk_period);
    sim.lk_decay = c.num("sim.lk_decay", sim.lk_decay);
    sim.cue_offset = c.num("sim.cue_offset", sim.cue_offset);
    sim.cue_time = c.num("sim.cue_time", sim.cue_time);
    try {
        sim.validate();
    } catch (const DomainError& e) {
        throw ConfigError("sim", std::string("invalid simulator settings: ") + e.what());
    }

    s.horizon.horizon = sim.horizon_s;
    s.horizon.train_lead = c.num("prep.train_lead", s.horizon.train_lead);
    s.horizon.train_tail = c.num("prep.train_tail", s.horizon.train_tail);
    s.horizon.grid_jitter = c.num("prep.grid_jitter", s.horizon.grid_jitter);
    if (!(s.horizon.horizon > 0.0)) throw ConfigError("prep.horizon", "config key 'prep.horizon' must be positive");

    s.split.seed = c.seed("split.seed");
    s.split.maneuver_fraction = fraction(c, "split.maneuver_fraction", s.split.maneuver_fraction);
    s.split.position_test_fraction = fraction(c, "split.position_test_fraction", s.split.position_test_fraction);
    s.split.folds = static_cast<int>(count(c, "split.folds", s.split.folds, 3));

    s.select.seed = c.seed("select.seed");
    s.select.theta = fraction(c, "select.theta", s.select.theta);
    s.select.wrapper_algos = algo_list(c, "select.wrapper_algos", {"GNB", "MLP"});
    s.select.wrapper_start = variant_of("select.wrapper_start", c.str("select.wrapper_start", "B"));
    if (s.select.wrapper_start == 'D')
        throw ConfigError("select.wrapper_start", "the wrapper cannot start from its own output");
    s.select.wrapper_max_rows = count(c, "select.wrapper_max_rows", static_cast<long long>(s.select.wrapper_max_rows));
    s.select.wrapper_train_fold = static_cast<int>(count(c, "select.wrapper_train_fold", 1, 1));
    s.select.wrapper_val_fold = static_cast<int>(count(c, "select.wrapper_val_fold", 2, 1));
    for (const auto& [key, f] : {std::pair{"select.wrapper_train_fold", s.select.wrapper_train_fold},
                                 std::pair{"select.wrapper_val_fold", s.select.wrapper_val_fold}})
        if (f >= s.split.folds)
            throw ConfigError(key, std::string("config key '") + key + "' must name a training fold, not the test fold");
    if (s.select.wrapper_train_fold == s.select.wrapper_val_fold)
        throw ConfigError("select.wrapper_val_fold", "wrapper training and validation folds must differ");

    s.clf.seed = c.seed("clf.seed");
    s.clf.algos = algo_list(c, "clf.algos", {"GNB", "RF", "MLP"});
    s.clf.fpr_max = fraction(c, "clf.fpr_max", s.clf.fpr_max);
    s.clf.cv_rotations = count(c, "clf.cv_rotations", 0);
    for (auto a : {learn::Algo::GNB, learn::Algo::RF, learn::Algo::MLP}) {
        const std::string key = "clf." + learn::to_string(a) + ".variants";
        const std::vector<std::string> fallback =
            a == learn::Algo::RF ? std::vector<std::string>{"A", "B", "C"} : std::vector<std::string>{"A", "B", "C", "D"};
        auto& vs = s.clf.variants[a];
        for (const auto& v : c.list(key, fallback)) vs.push_back(variant_of(key, v));
        if (vs.empty()) throw ConfigError(key, "config key '" + key + "' is empty");
        const bool has_wrapper =
            std::find(s.select.wrapper_algos.begin(), s.select.wrapper_algos.end(), a) != s.select.wrapper_algos.end();
        if (!has_wrapper) vs.erase(std::remove(vs.begin(), vs.end(), 'D'), vs.end());
        if (vs.empty()) throw ConfigError(key, "config key '" + key + "' only lists D, which select does not produce");
        s.clf.grid[a] = grid_of(c, a);
    }

    s.pred.seed = c.seed("pred.seed");
    s.pred.classifiers.clear();
    for (const auto& n : c.list("pred.classifiers", {"RF", "MLP"}))
        s.pred.classifiers.push_back(learn::to_string(algo_of("pred.classifiers", n)));
    for (const auto& n : s.pred.classifiers)
        if (std::find(s.clf.algos.begin(), s.clf.algos.end(), learn::parse_algo(n)) == s.clf.algos.end())
            throw ConfigError("pred.classifiers", "pred.classifiers lists " + n + ", which clf.algos does not train");
    s.pred.gmm.k_max = static_cast<int>(count(c, "pred.k_max", 50, 1));
    s.pred.gmm.max_iter = static_cast<int>(count(c, "pred.max_iter", 150, 1));
    s.pred.gmm.restarts = static_cast<int>(count(c, "pred.restarts", 1, 1));
    s.pred.gmm.deletion_iter = static_cast<int>(count(c, "pred.deletion_iter", 50, 1));
    s.pred.max_fit_rows = count(c, "pred.max_fit_rows", static_cast<long long>(s.pred.max_fit_rows), 10);
    s.pred.confidence_rows = count(c, "pred.confidence_rows", static_cast<long long>(s.pred.confidence_rows), 10);
    s.pred.train_stride = count(c, "pred.train_stride", static_cast<long long>(s.pred.train_stride), 1);
    s.pred.test_stride = count(c, "pred.test_stride", static_cast<long long>(s.pred.test_stride), 1);
    s.pred.write_exploded = c.flag("pred.write_exploded", false);
    const auto pri = c.num_list("pred.priors", {s.pred.priors[0], s.pred.priors[1], s.pred.priors[2]});
    if (pri.size() != 3) throw ConfigError("pred.priors", "pred.priors needs three values (LCL, FLW, LCR)");
    s.pred.priors = {pri[0], pri[1], pri[2]};

    s.eval.per_class_limit = count(c, "eval.per_class_limit", static_cast<long long>(s.eval.per_class_limit), 1);
    s.eval.tau_bin = c.num("eval.tau_bin", s.eval.tau_bin);
    if (!(s.eval.tau_bin > 0.0)) throw ConfigError("eval.tau_bin", "config key 'eval.tau_bin' must be positive");
    s.eval.confidence_classifier = learn::to_string(
        algo_of("eval.confidence_classifier", c.str("eval.confidence_classifier", s.pred.classifiers.back())));
    s.eval.confidence_strategy = strategy_of(c, "eval.confidence_strategy", s.eval.confidence_strategy);

    s.predict.input = c.str("predict.input", "");
    s.predict.output = c.str("predict.output", (s.paths.work / "predictions.csv").string());
    s.predict.classifier =
        learn::to_string(algo_of("predict.classifier", c.str("predict.classifier", s.pred.classifiers.back())));
    s.predict.strategy = strategy_of(c, "predict.strategy", s.predict.strategy);
    return s;
}

}  // namespace bpred::pipeline
