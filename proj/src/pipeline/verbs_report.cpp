#include <ostream>

#include "bpred/eval/metrics.hpp"
#include "internal.hpp"
#include "verbs.hpp"

namespace bpred::pipeline::verbs {

using namespace detail;

namespace {

double number(const nlohmann::json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw DomainError("unexpected numeric string '" + s + "'");
    }
    return v.get<double>();
}

int maneuver_index(const nlohmann::json& v) { return static_cast<int>(index_of(parse_maneuver(v.get<std::string>()))); }

}  // namespace

void report(const Settings& s, std::ostream& out) {
    const auto clf_file = s.paths.metrics() / "clf_metrics.json";
    const auto pred_file = s.paths.metrics() / "pred_metrics.json";
    require_file(clf_file, "eval-clf");
    require_file(pred_file, "eval-pred");
    const auto cm = read_json(clf_file);
    const auto pm = read_json(pred_file);

    eval::ReportBundle rb;
    rb.tau_bin = s.eval.tau_bin;
    nlohmann::json summary;
    try {
        for (const auto& [name, j] : cm.at("classifiers").items()) {
            for (const auto& r : j.at("roc")) {
                eval::RocEntry e;
                e.classifier = name;
                e.maneuver = maneuver_index(r.at("maneuver"));
                e.roc.auc = r.at("auc").get<double>();
                for (const auto& p : r.at("points"))
                    e.roc.curve.points.push_back({number(p.at(0)), p.at(1).get<double>(), p.at(2).get<double>()});
                rb.rocs.push_back(std::move(e));
            }
            for (const auto& t : j.at("tau"))
                rb.taus.push_back({name, maneuver_index(t.at("maneuver")), {t.at("tau_f").get<double>(), t.at("tau_c").get<double>()}});
            summary["classifiers"][name] = {{"features", j.at("features")},
                                            {"bacc", j.at("bacc")},
                                            {"auc", j.at("auc")},
                                            {"tau", j.at("tau_summary")}};
        }
        for (const auto& e : pm.at("errors"))
            rb.errors.push_back({e.at("series").get<std::string>(), error_table_from_json(e.at("table"))});
        for (const auto& r : pm.at("loglik")) {
            eval::LoglikRow row;
            row.classifier = r.at("classifier").get<std::string>();
            row.strategy = r.at("strategy").get<std::string>();
            row.lx = r.at("loglik_x").get<double>();
            row.lx_norm = r.at("loglik_x_norm").get<double>();
            row.ly = r.at("loglik_y").get<double>();
            row.ly_norm = r.at("loglik_y_norm").get<double>();
            rb.loglik.push_back(row);
        }
        const auto& conf = pm.at("confidence");
        const auto series = conf.at("series").get<std::string>();
        for (const auto& p : conf.at("points"))
            rb.confidence.push_back(
                {series, p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>(), p.at(3).get<double>()});
        summary["loglik"] = pm.at("loglik");
        summary["errors_at_horizon"] = pm.at("headline");
        summary["confidence"] = {{"series", series},
                                 {"spearman_y", conf.at("spearman_y")},
                                 {"spearman_x", conf.at("spearman_x")}};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("metrics", 0, std::string("malformed metrics file: ") + e.what());
    }
    eval::emit_report(rb, s.paths.report());
    write_json(s.paths.report() / "summary.json", summary);
    out << "report: " << rb.rocs.size() << " ROC curves, " << rb.taus.size() << " detection times, " << rb.errors.size()
        << " error series, " << rb.loglik.size() << " log-likelihood rows, " << rb.confidence.size()
        << " confidence points -> " << s.paths.report().string() << '\n';
}

}  // namespace bpred::pipeline::verbs
