#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bpred/core/dataset_io.hpp"
#include "bpred/core/text.hpp"
#include "bpred/eval/metrics.hpp"
#include "internal.hpp"
#include "verbs.hpp"

namespace bpred::pipeline::verbs {

using namespace detail;
using predict::Probs;
using predict::StartInputs;
using predict::Strategy;

namespace {

std::vector<StartInputs> start_inputs(const std::vector<prep::TrajectoryStart>& starts, const Catalog& cat) {
    std::vector<StartInputs> out;
    out.reserve(starts.size());
    for (const auto& st : starts) out.push_back(predict::start_inputs(cat, st.features));
    return out;
}

std::vector<Probs> classifier_probs(const Settings& s, const std::string& name,
                                    const std::vector<prep::TrajectoryStart>& starts, const Catalog& cat) {
    const auto model = load_classifier(s, name);
    const learn::RowMatrix p = model.predict_proba(start_matrix(starts, cat, model.feature_ids));
    std::vector<Probs> out(starts.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out[i] = {p(r, 0), p(r, 1), p(r, 2)};
    }
    return out;
}

// Builds model rows from exploded rows; `fill` writes one row into a buffer of dims.size() values.
template <class Fill>
learn::RowMatrix model_rows(const std::vector<std::size_t>& picked, std::size_t width, Fill fill) {
    learn::RowMatrix m(static_cast<Eigen::Index>(picked.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < picked.size(); ++i) fill(picked[i], m.row(static_cast<Eigen::Index>(i)).data());
    return m;
}

constexpr std::size_t kMinExpertStarts = 30;

struct FitLog {
    nlohmann::json entries = nlohmann::json::array();
    std::size_t components = 0;
};

}  // namespace

void train_pred(const Settings& s, std::ostream& out) {
    const Dataset ds = load_labeled(s);
    const auto sp = load_split(s, ds);
    const Catalog& cat = ds.catalog;
    auto set = prep::explode_training(prep::select_situations(ds, sp.partition.position_train), s.horizon,
                                      mix_seed(s.pred.seed, 1), s.pred.train_stride);
    if (set.starts.empty()) throw DomainError("position training data has no usable start points");
    const auto inputs = start_inputs(set.starts, cat);
    std::map<std::string, std::vector<Probs>> probs;
    for (const auto& name : s.pred.classifiers) probs[name] = classifier_probs(s, name, set.starts, cat);

    FitLog log;
    std::uint64_t fit_no = 0;
    auto fit = [&](const std::string& what, const learn::RowMatrix& rows, const std::vector<std::string>& dims) {
        auto cfg = s.pred.gmm;
        cfg.seed = mix_seed(s.pred.seed, 100 + fit_no++);
        if (rows.rows() < 2 * static_cast<Eigen::Index>(dims.size()))
            throw DomainError("too few rows (" + std::to_string(rows.rows()) + ") to fit the " + what +
                              "; increase sim.n_situations or lower pred.train_stride");
        auto r = learn::fit_gmm(rows, dims, cfg);
        log.entries.push_back({{"model", what},
                               {"rows", rows.rows()},
                               {"components", r.model.size()},
                               {"iterations", r.iterations},
                               {"bound", r.bound}});
        log.components += r.model.size();
        return std::move(r.model);
    };

    // exploded rows of the given start subset
    auto rows_of = [&](const std::vector<char>& use) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < set.rows.size(); ++i)
            if (use[set.rows[i].start]) idx.push_back(i);
        return idx;
    };
    auto subsample = [&](const std::vector<std::size_t>& idx, std::size_t cap, std::uint64_t salt) {
        const auto pick = pick_rows(idx.size(), cap, mix_seed(s.pred.seed, salt));
        std::vector<std::size_t> out;
        out.reserve(pick.size());
        for (auto p : pick) out.push_back(idx[p]);
        return out;
    };
    auto lateral = [&](const std::vector<std::size_t>& picked) {
        return model_rows(picked, 4, [&](std::size_t r, double* o) {
            const auto& row = set.rows[r];
            const auto& in = inputs[row.start];
            o[0] = in.v_y;
            o[1] = in.d_y_cl;
            o[2] = row.t;
            o[3] = row.y;
        });
    };
    auto longitudinal = [&](const std::vector<std::size_t>& picked, bool leader) {
        return model_rows(picked, leader ? 6 : 4, [&](std::size_t r, double* o) {
            const auto& row = set.rows[r];
            const auto in = predict::longitudinal_inputs(inputs[row.start], leader, row.t);
            std::copy(in.begin(), in.end(), o);
            o[in.size()] = row.x - predict::cv_prediction(0.0, inputs[row.start].v_x, row.t);
        });
    };
    const std::size_t n = set.starts.size();
    std::vector<char> everyone(n, 1), with_leader(n, 0), without_leader(n, 0);
    for (std::size_t i = 0; i < n; ++i) (inputs[i].leader ? with_leader : without_leader)[i] = 1;
    auto both = [](const std::vector<char>& a, const std::vector<char>& b) {
        std::vector<char> o(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) o[i] = a[i] && b[i];
        return o;
    };
    const std::array<const std::vector<char>*, 2> leader_sets{&without_leader, &with_leader};
    const std::size_t cap = s.pred.max_fit_rows;

    predict::PredictorBundle b;
    b.priors = s.pred.priors;
    const auto experts = prep::expert_starts(set, mix_seed(s.pred.seed, 2));
    for (std::size_t m = 0; m < 3; ++m) {
        std::vector<char> use(n, 0);
        for (auto i : experts[m]) use[i] = 1;
        const std::string name(to_string(kManeuvers[m]));
        b.lateral_experts[m] =
            fit("lateral " + name + " expert", lateral(subsample(rows_of(use), cap, 10 + m)), predict::lateral_dims());
        for (int l = 0; l < 2; ++l) {
            auto sel = both(use, *leader_sets[static_cast<std::size_t>(l)]);
            std::string what = "longitudinal " + name + " expert" + (l ? " with leader" : "");
            // the leaderless model only reads v_x and a_x, so a maneuver that
            // rarely happens without a leader can borrow every start of its class
            if (l == 0 && static_cast<std::size_t>(std::count(sel.begin(), sel.end(), 1)) < kMinExpertStarts) {
                sel = use;
                what += " (all starts of the class)";
            }
            b.longitudinal_experts[m].models[static_cast<std::size_t>(l)] =
                fit(what,
                    longitudinal(subsample(rows_of(sel), cap, 20 + 2 * m + static_cast<std::size_t>(l)), l == 1),
                    predict::longitudinal_dims(l == 1));
        }
    }
    b.lateral_pooled = fit("lateral pooled", lateral(subsample(rows_of(everyone), cap, 30)), predict::lateral_dims());
    for (int l = 0; l < 2; ++l)
        b.longitudinal_pooled.models[static_cast<std::size_t>(l)] =
            fit(std::string("longitudinal pooled") + (l ? " with leader" : ""),
                longitudinal(subsample(rows_of(*leader_sets[static_cast<std::size_t>(l)]), cap, 31 + static_cast<std::size_t>(l)),
                             l == 1),
                predict::longitudinal_dims(l == 1));

    // integrated models: unbalanced rows, probabilities attached and mirrored
    std::uint64_t salt = 40;
    for (const auto& name : s.pred.classifiers) {
        const auto& p = probs.at(name);
        auto integrated = [&](const std::vector<std::size_t>& idx, std::uint64_t k) {
            std::vector<prep::ExplodedRow> rows;
            for (auto r : subsample(idx, cap / 2, k)) {
                auto row = set.rows[r];
                row.p_lcl = p[row.start][0];
                row.p_lcr = p[row.start][2];
                rows.push_back(row);
            }
            return prep::mirror_probabilities(rows);
        };
        const auto lat_rows = integrated(rows_of(everyone), salt++);
        learn::RowMatrix lm(static_cast<Eigen::Index>(lat_rows.size()), 6);
        for (std::size_t i = 0; i < lat_rows.size(); ++i) {
            const auto& r = lat_rows[i];
            const auto& in = inputs[r.start];
            lm.row(static_cast<Eigen::Index>(i)) << in.v_y, in.d_y_cl, r.p_lcl, r.p_lcr, r.t, r.y;
        }
        b.lateral_integrated[name] = fit("lateral integrated " + name, lm, predict::lateral_integrated_dims());
        for (int l = 0; l < 2; ++l) {
            const bool leader = l == 1;
            const auto rows = integrated(rows_of(*leader_sets[static_cast<std::size_t>(l)]), salt++);
            const std::size_t w = leader ? 8 : 6;
            learn::RowMatrix xm(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(w));
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& r = rows[i];
                const auto in = predict::longitudinal_inputs(inputs[r.start], leader, r.t);
                double* o = xm.row(static_cast<Eigen::Index>(i)).data();
                std::copy(in.begin(), in.end() - 1, o);  // drop t, re-added after the probabilities
                o[in.size() - 1] = r.p_lcl;
                o[in.size()] = r.p_lcr;
                o[in.size() + 1] = r.t;
                o[in.size() + 2] = r.x - predict::cv_prediction(0.0, inputs[r.start].v_x, r.t);
            }
            b.longitudinal_integrated[name].models[static_cast<std::size_t>(l)] =
                fit("longitudinal integrated " + name + (leader ? " with leader" : ""), xm,
                    predict::longitudinal_integrated_dims(leader));
        }
    }

    // confidence densities over the start inputs
    {
        const auto pick = pick_rows(n, s.pred.confidence_rows, mix_seed(s.pred.seed, 60));
        learn::RowMatrix cy(static_cast<Eigen::Index>(pick.size()), 2);
        for (std::size_t i = 0; i < pick.size(); ++i) cy.row(static_cast<Eigen::Index>(i)) << inputs[pick[i]].v_y, inputs[pick[i]].d_y_cl;
        b.confidence_y = predict::make_confidence_model(fit("lateral confidence", cy, predict::lateral_input_dims()));
        for (int l = 0; l < 2; ++l) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < n; ++i)
                if ((*leader_sets[static_cast<std::size_t>(l)])[i]) idx.push_back(i);
            const auto sub = subsample(idx, s.pred.confidence_rows, 61 + static_cast<std::size_t>(l));
            const auto dims = predict::longitudinal_input_dims(l == 1);
            learn::RowMatrix cx(static_cast<Eigen::Index>(sub.size()), static_cast<Eigen::Index>(dims.size()));
            for (std::size_t i = 0; i < sub.size(); ++i) {
                const auto in = predict::longitudinal_inputs(inputs[sub[i]], l == 1, 0.0);
                for (std::size_t d = 0; d < dims.size(); ++d) cx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = in[d];
            }
            b.confidence_x[static_cast<std::size_t>(l)] = predict::make_confidence_model(
                fit(std::string("longitudinal confidence") + (l ? " with leader" : ""), cx, dims));
        }
    }

    write_json(s.paths.models() / "predictor.json", predict::bundle_to_json(b));
    write_json(s.paths.models() / "predictor_fits.json",
               {{"starts", n}, {"rows", set.rows.size()}, {"skipped_starts", set.skipped}, {"fits", log.entries}});
    if (s.pred.write_exploded) {
        const auto& p = probs.at(s.pred.classifiers.back());
        for (std::size_t i = 0; i < n; ++i) {
            set.starts[i].p_lcl = p[i][0];
            set.starts[i].p_lcr = p[i][2];
        }
        prep::broadcast_probabilities(set);
        prep::save_exploded(set, cat, s.paths.exploded() / "train");
    }
    out << "train-pred: " << n << " starts, " << set.rows.size() << " exploded rows in; " << log.entries.size()
        << " mixtures, " << log.components << " components -> " << (s.paths.models() / "predictor.json").string()
        << '\n';
}

namespace {

struct Combo {
    std::string classifier;  // "-" for strategies without one
    Strategy strategy;
    std::string name() const {
        return classifier == "-" ? predict::to_string(strategy) : classifier + "/" + predict::to_string(strategy);
    }
};

}  // namespace

void eval_pred(const Settings& s, std::ostream& out) {
    const Dataset ds = load_labeled(s);
    const auto sp = load_split(s, ds);
    const Catalog& cat = ds.catalog;
    require_file(s.paths.models() / "predictor.json", "train-pred");
    const predict::Predictor predictor(predict::bundle_from_json(read_json(s.paths.models() / "predictor.json")));
    auto set = prep::explode_test(prep::select_situations(ds, sp.partition.position_test), s.horizon, s.pred.test_stride);
    if (set.starts.empty()) throw DomainError("position test data has no usable start points");
    const auto times = s.horizon.test_times();
    const std::size_t n = set.starts.size(), nt = times.size();
    if (set.rows.size() != n * nt) throw Error("test explosion has an unexpected row layout");
    const auto inputs = start_inputs(set.starts, cat);
    std::map<std::string, std::vector<Probs>> probs;
    for (const auto& name : s.pred.classifiers) probs[name] = classifier_probs(s, name, set.starts, cat);

    std::vector<Combo> combos{{"-", Strategy::Labels}, {"-", Strategy::Priors}, {"-", Strategy::NOCLF}};
    for (const auto& name : s.pred.classifiers)
        for (auto st : {Strategy::Raw, Strategy::WTA, Strategy::PWRaw, Strategy::IGMM}) combos.push_back({name, st});
    const std::size_t nc = combos.size();
    std::size_t conf_combo = nc, noclf_combo = 2;
    for (std::size_t c = 0; c < nc; ++c)
        if (combos[c].classifier == s.eval.confidence_classifier && combos[c].strategy == s.eval.confidence_strategy)
            conf_combo = c;
    if (conf_combo == nc)
        throw ConfigError("eval.confidence_classifier", "the confidence series " + s.eval.confidence_classifier + "/" +
                                                            predict::to_string(s.eval.confidence_strategy) +
                                                            " is not among the evaluated combinations");

    // per start sums of log densities, per (start, t) absolute errors; the extra series is the CV baseline
    std::vector<double> lx(nc * n), ly(nc * n);
    std::vector<float> ex((nc + 1) * n * nt), ey((nc + 1) * n * nt);
    std::vector<double> conf_x(n), conf_y(n);
    auto at = [&](std::size_t c, std::size_t i, std::size_t k) { return (c * n + i) * nt + k; };

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t i = 0; i < n; ++i) {
      try {
        const auto& in = inputs[i];
        conf_x[i] = predictor.confidence_x(in);
        conf_y[i] = predictor.confidence_y(in);
        std::vector<double> sx(nc, 0.0), sy(nc, 0.0);
        for (std::size_t k = 0; k < nt; ++k) {
            const auto& row = set.rows[i * nt + k];
            const double t = row.t;
            const auto lat = predictor.lateral_parts(in, t);
            const auto lon = predictor.longitudinal_parts(in, t);
            for (std::size_t c = 0; c < nc; ++c) {
                const auto& cb = combos[c];
                predict::GateInput gate;
                gate.label = set.starts[i].label;
                if (cb.classifier != "-") gate.probs = probs.at(cb.classifier)[i];
                predict::PositionDistribution dy, dx;
                if (cb.strategy == Strategy::NOCLF || cb.strategy == Strategy::IGMM) {
                    dy = predictor.lateral(cb.strategy, in, gate, t, cb.classifier);
                    dx = predictor.longitudinal(cb.strategy, in, gate, t, cb.classifier);
                } else {
                    const auto w = predict::gate_weights(cb.strategy, gate.probs, gate.label, predictor.bundle().priors);
                    dy = predict::Predictor::mix(lat, w);
                    dx = predict::Predictor::mix(lon, w);
                }
                sy[c] += dy.logpdf(row.y);
                sx[c] += dx.logpdf(row.x);
                ey[at(c, i, k)] = static_cast<float>(std::abs(row.y - dy.mean()));
                ex[at(c, i, k)] = static_cast<float>(std::abs(row.x - dx.mean()));
            }
            ey[at(nc, i, k)] = static_cast<float>(std::abs(row.y));
            ex[at(nc, i, k)] = static_cast<float>(std::abs(row.x - predict::cv_prediction(0.0, in.v_x, t)));
        }
        for (std::size_t c = 0; c < nc; ++c) {
            lx[c * n + i] = sx[c];
            ly[c * n + i] = sy[c];
        }
      } catch (...) {
#pragma omp critical(eval_pred_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    const double rows = static_cast<double>(n * nt);
    std::vector<double> mean_x(nc), mean_y(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            a += lx[c * n + i];
            b += ly[c * n + i];
        }
        mean_x[c] = a / rows;
        mean_y[c] = b / rows;
    }
    nlohmann::json loglik = nlohmann::json::array();
    for (std::size_t c = 0; c < nc; ++c)
        loglik.push_back({{"classifier", combos[c].classifier},
                          {"strategy", predict::to_string(combos[c].strategy)},
                          {"loglik_x", mean_x[c]},
                          {"loglik_x_norm", eval::normalize_loglik(mean_x[c], mean_x[0])},
                          {"loglik_y", mean_y[c]},
                          {"loglik_y_norm", eval::normalize_loglik(mean_y[c], mean_y[0])}});

    std::vector<int> maneuver(n);
    for (std::size_t i = 0; i < n; ++i) maneuver[i] = static_cast<int>(index_of(set.starts[i].label));
    nlohmann::json errors = nlohmann::json::array();
    nlohmann::json headline = nlohmann::json::object();
    for (std::size_t c = 0; c <= nc; ++c) {
        eval::TrajectoryErrors te;
        te.times = times;
        te.maneuver = maneuver;
        te.ex.resize(n);
        te.ey.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            te.ex[i].assign(ex.begin() + static_cast<std::ptrdiff_t>(at(c, i, 0)), ex.begin() + static_cast<std::ptrdiff_t>(at(c, i, 0) + nt));
            te.ey[i].assign(ey.begin() + static_cast<std::ptrdiff_t>(at(c, i, 0)), ey.begin() + static_cast<std::ptrdiff_t>(at(c, i, 0) + nt));
        }
        const auto table = eval::spatial_errors(te, s.eval.per_class_limit);
        const std::string name = c < nc ? combos[c].name() : "CV";
        errors.push_back({{"series", name}, {"table", error_table_to_json(table)}});
        headline[name] = {{"median_x_at_horizon", table.x.back().median}, {"median_y_at_horizon", table.y.back().median}};
    }

    std::vector<double> err_x(n), err_y(n);
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
        err_x[i] = ex[at(noclf_combo, i, nt - 1)];
        err_y[i] = ey[at(conf_combo, i, nt - 1)];
        points.push_back({conf_x[i], err_x[i], conf_y[i], err_y[i]});
    }
    const auto rho_y = eval::spearman_test(conf_y, err_y);
    const auto rho_x = eval::spearman_test(conf_x, err_x);

    nlohmann::json m;
    m["starts"] = n;
    m["rows"] = n * nt;
    m["skipped_starts"] = set.skipped;
    std::array<std::size_t, 3> per{};
    for (int v : maneuver) ++per[static_cast<std::size_t>(v)];
    m["starts_per_class"] = per;
    m["loglik"] = loglik;
    m["errors"] = errors;
    m["headline"] = headline;
    m["confidence"] = {{"series", combos[conf_combo].name()},
                       {"x_series", combos[noclf_combo].name()},
                       {"t", times.back()},
                       {"points", points},
                       {"spearman_y", {{"rho", rho_y.rho}, {"p_value", rho_y.p_value}}},
                       {"spearman_x", {{"rho", rho_x.rho}, {"p_value", rho_x.p_value}}}};
    write_json(s.paths.metrics() / "pred_metrics.json", m);
    if (s.pred.write_exploded) prep::save_exploded(set, cat, s.paths.exploded() / "test");

    out << "eval-pred: " << n << " starts, " << n * nt << " rows; median |y| error at " << times.back() << " s: "
        << combos[conf_combo].name() << " " << fixed(headline[combos[conf_combo].name()]["median_y_at_horizon"].get<double>())
        << " m, Labels " << fixed(headline["Labels"]["median_y_at_horizon"].get<double>()) << " m, CV "
        << fixed(headline["CV"]["median_y_at_horizon"].get<double>()) << " m; conf_y rho " << fixed(rho_y.rho) << '\n';
}

void predict(const Settings& s, std::ostream& out) {
    if (s.predict.input.empty()) throw ConfigError("predict.input", "missing config key 'predict.input'");
    require_file(s.predict.input, "a feature CSV at predict.input");
    require_file(s.paths.models() / "predictor.json", "train-pred");
    require_file(s.paths.labeled() / "catalog.json", "label");
    const Catalog cat = load_catalog(s.paths.labeled() / "catalog.json");
    const predict::Predictor predictor(predict::bundle_from_json(read_json(s.paths.models() / "predictor.json")));
    const bool needs_clf = s.predict.strategy != Strategy::NOCLF && s.predict.strategy != Strategy::Labels &&
                           s.predict.strategy != Strategy::Priors;
    learn::ClassifierModel clf;
    if (needs_clf) clf = load_classifier(s, s.predict.classifier);

    std::ifstream in(s.predict.input, std::ios::binary);
    if (!in) throw Error("cannot read " + s.predict.input.string());
    const std::string file = s.predict.input.string();
    std::string line;
    if (!std::getline(in, line)) throw ParseError(file, 1, "empty file");
    std::vector<std::string> header;
    for (auto f : split_csv(line)) header.emplace_back(f);
    std::vector<int> column_of(cat.size(), -1);
    int label_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label") {
            label_col = static_cast<int>(c);
            continue;
        }
        const auto idx = cat.find(header[c]);
        if (!idx) throw ParseError(file, 1, "unknown feature column '" + header[c] + "'");
        column_of[*idx] = static_cast<int>(c);
    }
    std::vector<std::string> required{"v_y", "d_y_cl", "v_x", "a_x", "actv_f", "d_rel_f_v", "v_rel_f_v"};
    if (needs_clf) required.insert(required.end(), clf.feature_ids.begin(), clf.feature_ids.end());
    for (const auto& id : required)
        if (column_of[cat.index(id)] < 0) throw ParseError(file, 1, "missing feature column '" + id + "'");
    if (s.predict.strategy == Strategy::Labels && label_col < 0)
        throw ParseError(file, 1, "the Labels strategy needs a 'label' column");

    const auto times = s.horizon.test_times();
    std::ostringstream csv;
    csv << "row,t,x_mean,x_var,y_mean,y_var,x_mixture,y_mixture\n";
    auto dump = [](const predict::PositionDistribution& d) {
        std::string o;
        for (std::size_t k = 0; k < d.weights.size(); ++k) {
            if (k) o += ' ';
            o += format_double(d.weights[k]) + ":" + format_double(d.means[k]) + ":" + format_double(d.variances[k]);
        }
        return o;
    };
    std::size_t no = 1, rows = 0;
    std::vector<double> feats(cat.size());
    std::vector<double> crow(clf.feature_ids.size());
    const auto ccols = needs_clf ? cat.indices(clf.feature_ids) : std::vector<std::size_t>{};
    while (std::getline(in, line)) {
        ++no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) throw ParseError(file, no, "expected " + std::to_string(header.size()) + " cells");
        std::fill(feats.begin(), feats.end(), 0.0);
        predict::GateInput gate;
        for (std::size_t f = 0; f < cat.size(); ++f) {
            if (column_of[f] < 0) continue;
            const auto v = parse_double(cells[static_cast<std::size_t>(column_of[f])]);
            if (!v || std::isnan(*v)) throw ParseError(file, no, "non-numeric value for " + cat[f].id);
            feats[f] = *v;
        }
        if (label_col >= 0) {
            try {
                gate.label = parse_maneuver(cells[static_cast<std::size_t>(label_col)]);
            } catch (const DomainError& e) {
                throw ParseError(file, no, e.what());
            }
        }
        if (needs_clf) {
            for (std::size_t c = 0; c < ccols.size(); ++c) crow[c] = feats[ccols[c]];
            gate.probs = clf.predict_proba(crow.data());
        }
        const auto si = predict::start_inputs(cat, feats);
        for (double t : times) {
            const auto dx = predictor.longitudinal(s.predict.strategy, si, gate, t, s.predict.classifier);
            const auto dy = predictor.lateral(s.predict.strategy, si, gate, t, s.predict.classifier);
            csv << rows << ',' << format_double(t) << ',' << format_double(dx.mean()) << ',' << format_double(dx.variance())
                << ',' << format_double(dy.mean()) << ',' << format_double(dy.variance()) << ',' << dump(dx) << ','
                << dump(dy) << '\n';
        }
        ++rows;
    }
    ensure_dir(s.predict.output.parent_path().empty() ? "." : s.predict.output.parent_path());
    std::ofstream o(s.predict.output, std::ios::binary);
    if (!o) throw Error("cannot write " + s.predict.output.string());
    o << csv.str();
    o.close();
    if (!o) throw Error("error while writing " + s.predict.output.string());
    out << "predict: " << rows << " feature rows in, " << rows * times.size() << " predictions ("
        << predict::to_string(s.predict.strategy) << ") -> " << s.predict.output.string() << '\n';
}

}  // namespace bpred::pipeline::verbs
