#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "bpred/core/text.hpp"
#include "bpred/core/types.hpp"
#include "bpred/eval/metrics.hpp"

namespace bpred::eval {

double avg_loglik(const std::vector<double>& row_logpdf) {
    if (row_logpdf.empty()) throw DomainError("avg_loglik of an empty row set");
    double s = 0.0;
    for (double v : row_logpdf) s += v;
    return s / static_cast<double>(row_logpdf.size());
}

ErrorStats error_stats(const std::vector<double>& errors) {
    ErrorStats st;
    st.n = errors.size();
    if (errors.empty()) return st;
    std::vector<double> v = errors;
    std::sort(v.begin(), v.end());
    st.median = quantile(v, 0.5);
    st.q1 = quantile(v, 0.25);
    st.q3 = quantile(v, 0.75);
    st.p05 = quantile(v, 0.05);
    st.p95 = quantile(v, 0.95);
    return st;
}

TrajectoryErrors trajectory_errors(const std::vector<double>& times,
                                   const std::vector<std::vector<std::array<double, 2>>>& truth,
                                   const std::vector<std::vector<std::array<double, 2>>>& predicted,
                                   const std::vector<int>& maneuver) {
    if (truth.size() != predicted.size() || truth.size() != maneuver.size())
        throw DomainError("trajectory_errors: trajectory counts differ");
    TrajectoryErrors e;
    e.times = times;
    e.maneuver = maneuver;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i].size() != times.size() || predicted[i].size() != times.size())
            throw DomainError("trajectory_errors: trajectory " + std::to_string(i) + " has the wrong length");
        std::vector<double> ex(times.size()), ey(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            ex[k] = std::abs(truth[i][k][0] - predicted[i][k][0]);
            ey[k] = std::abs(truth[i][k][1] - predicted[i][k][1]);
        }
        e.ex.push_back(std::move(ex));
        e.ey.push_back(std::move(ey));
    }
    return e;
}

ErrorTable spatial_errors(const TrajectoryErrors& errors, std::size_t per_class_limit) {
    ErrorTable t;
    t.times = errors.times;
    const std::size_t n = errors.ex.size();
    std::array<std::vector<std::size_t>, 3> members;
    for (std::size_t i = 0; i < n; ++i) {
        const int m = errors.maneuver[i];
        if (m < 0 || m > 2) throw DomainError("spatial_errors: maneuver index outside 0..2");
        if (members[static_cast<std::size_t>(m)].size() < per_class_limit)
            members[static_cast<std::size_t>(m)].push_back(i);
    }
    for (std::size_t k = 0; k < errors.times.size(); ++k) {
        std::vector<double> ax(n), ay(n);
        for (std::size_t i = 0; i < n; ++i) {
            ax[i] = errors.ex[i][k];
            ay[i] = errors.ey[i][k];
        }
        t.x.push_back(error_stats(ax));
        t.y.push_back(error_stats(ay));
        for (std::size_t m = 0; m < 3; ++m) {
            std::vector<double> cx, cy;
            for (auto i : members[m]) {
                cx.push_back(errors.ex[i][k]);
                cy.push_back(errors.ey[i][k]);
            }
            t.x_by_class[m].push_back(error_stats(cx));
            t.y_by_class[m].push_back(error_stats(cy));
        }
    }
    return t;
}

namespace {

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot write " + path.string());
        out_ << header << '\n';
    }
    void row(const std::string& line) { out_ << line << '\n'; }
    ~CsvFile() = default;
    void close() {
        out_.close();
        if (!out_) throw Error("error while writing " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::string join(std::initializer_list<std::string> cells) {
    std::string s;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) s += ',';
        s += c;
        first = false;
    }
    return s;
}

std::string num(double v) { return format_double(v); }

void write_stats(CsvFile& f, const std::string& series, const std::string& slice, const std::string& axis, double t,
                 const ErrorStats& s) {
    f.row(join({series, slice, axis, num(t), std::to_string(s.n), num(s.median), num(s.q1), num(s.q3), num(s.p05),
                num(s.p95)}));
}

}  // namespace

void emit_report(const ReportBundle& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create report directory " + dir.string() + ": " + ec.message());

    for (std::size_t m = 0; m < 3; ++m) {
        CsvFile f(dir / ("roc_" + std::string(to_string(kManeuvers[m])) + ".csv"), "classifier,threshold,fpr,tpr,auc");
        for (const auto& e : report.rocs) {
            if (e.maneuver != static_cast<int>(m)) continue;
            for (const auto& p : e.roc.curve.points)
                f.row(join({e.classifier, num(p.threshold), num(p.fpr), num(p.tpr), num(e.roc.auc)}));
        }
        f.close();
    }

    {
        CsvFile f(dir / "errors_by_t.csv", "series,slice,axis,t,n,median,q1,q3,p05,p95");
        for (const auto& s : report.errors) {
            const auto& tb = s.table;
            for (std::size_t k = 0; k < tb.times.size(); ++k) {
                write_stats(f, s.name, "all", "x", tb.times[k], tb.x[k]);
                write_stats(f, s.name, "all", "y", tb.times[k], tb.y[k]);
                for (std::size_t m = 0; m < 3; ++m) {
                    const std::string slice(to_string(kManeuvers[m]));
                    write_stats(f, s.name, slice, "x", tb.times[k], tb.x_by_class[m][k]);
                    write_stats(f, s.name, slice, "y", tb.times[k], tb.y_by_class[m][k]);
                }
            }
        }
        f.close();
    }

    {
        CsvFile f(dir / "tau_hist.csv", "classifier,maneuver,metric,bin_lo,bin_hi,count,mean");
        // group by (classifier, maneuver) in first-appearance order
        std::vector<std::pair<std::string, int>> keys;
        std::map<std::pair<std::string, int>, std::vector<DetectionTimes>> groups;
        for (const auto& e : report.taus) {
            const auto key = std::make_pair(e.classifier, e.maneuver);
            if (!groups.count(key)) keys.push_back(key);
            groups[key].push_back(e.tau);
        }
        const double bin = report.tau_bin;
        const int nbins = static_cast<int>(std::ceil(5.0 / bin - 1e-9));
        for (const auto& key : keys) {
            const auto& v = groups[key];
            for (int which = 0; which < 2; ++which) {
                std::vector<std::size_t> counts(static_cast<std::size_t>(nbins), 0);
                double sum = 0.0;
                for (const auto& d : v) {
                    const double tau = which == 0 ? d.tau_f : d.tau_c;
                    sum += tau;
                    // the last bin is closed so the 5 s cap lands inside it
                    const int b = std::min(nbins - 1, static_cast<int>(std::floor(tau / bin + 1e-9)));
                    ++counts[static_cast<std::size_t>(b)];
                }
                const double mean = sum / static_cast<double>(v.size());
                for (int b = 0; b < nbins; ++b)
                    f.row(join({key.first, std::string(to_string(kManeuvers[static_cast<std::size_t>(key.second)])),
                                which == 0 ? "tau_f" : "tau_c", num(b * bin), num(std::min(5.0, (b + 1) * bin)),
                                std::to_string(counts[static_cast<std::size_t>(b)]), num(mean)}));
            }
        }
        f.close();
    }

    {
        CsvFile f(dir / "loglik_table.csv", "classifier,strategy,loglik_x,loglik_x_norm,loglik_y,loglik_y_norm");
        for (const auto& r : report.loglik)
            f.row(join({r.classifier, r.strategy, r.has_x ? num(r.lx) : "", r.has_x ? num(r.lx_norm) : "", num(r.ly),
                        num(r.ly_norm)}));
        f.close();
    }

    {
        CsvFile f(dir / "confidence_scatter.csv", "series,conf_x,err_x,conf_y,err_y");
        for (const auto& p : report.confidence)
            f.row(join({p.series, num(p.conf_x), num(p.err_x), num(p.conf_y), num(p.err_y)}));
        f.close();
    }
}

}  // namespace bpred::eval
