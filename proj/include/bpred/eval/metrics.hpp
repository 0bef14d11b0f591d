#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace bpred::eval {

/// counts[true][predicted] over the classes LCL, FLW, LCR.
using Confusion = std::array<std::array<std::size_t, 3>, 3>;

Confusion confusion(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Mean per-class recall. Throws DomainError when a class has no samples.
double bacc(const Confusion& c);

struct RocPoint {
    double threshold;  // decision rule: score >= threshold
    double fpr;
    double tpr;
};

/// Points ordered from threshold +inf (0, 0) down to -inf (1, 1).
struct RocCurve {
    std::vector<RocPoint> points;
};

struct RocResult {
    RocCurve curve;
    double auc = 0.0;
};

/// AUC via the rank statistic with ties counted one half; curve over all
/// distinct scores plus the infinite endpoints. Throws if only one class is present.
RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& positive);

/// Smallest threshold whose false-positive rate stays within fpr_max.
double working_point(const RocCurve& roc, double fpr_max = 0.01);

struct DetectionTimes {
    double tau_f = 0.0;
    double tau_c = 0.0;
};

/// Detection times from a per-frame binary detection trace of the true class.
/// `times` are recording times (increasing); the window is [t_x - cap, t_x].
/// Throws DomainError when the trace does not cover that window.
DetectionTimes detection_times(const std::vector<double>& times, const std::vector<bool>& detected, double t_x,
                               double cap = 5.0);

/// 100 * reference / value for negative average log-likelihoods.
double normalize_loglik(double value, double reference);

/// Median of a copy of the values (mean of the two central values for even counts).
double median(std::vector<double> v);
/// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> v, double q);

/// Spearman correlation with a two-sided p-value from the t approximation.
struct CorrelationTest {
    double rho = 0.0;
    double p_value = 1.0;
};
CorrelationTest spearman_test(const std::vector<double>& x, const std::vector<double>& y);

/// Mean of per-row log densities of the true targets.
double avg_loglik(const std::vector<double>& row_logpdf);

/// Boxplot statistics of one error sample.
struct ErrorStats {
    std::size_t n = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double p05 = 0.0;
    double p95 = 0.0;
};
ErrorStats error_stats(const std::vector<double>& errors);

/// Absolute errors per trajectory and time, trajectories in rows.
struct TrajectoryErrors {
    std::vector<double> times;
    std::vector<std::vector<double>> ex;  // |x - x_hat|
    std::vector<std::vector<double>> ey;  // |y - y_hat|
    std::vector<int> maneuver;            // per trajectory, 0..2
};

/// Errors of predicted against true trajectories sampled at `times`.
TrajectoryErrors trajectory_errors(const std::vector<double>& times,
                                   const std::vector<std::vector<std::array<double, 2>>>& truth,
                                   const std::vector<std::vector<std::array<double, 2>>>& predicted,
                                   const std::vector<int>& maneuver);

struct ErrorTable {
    std::vector<double> times;
    std::vector<ErrorStats> x, y;                      // per time, all trajectories
    std::array<std::vector<ErrorStats>, 3> x_by_class, y_by_class;  // per time, per maneuver slice
};

/// Aggregates per time; each maneuver slice keeps at most `per_class_limit`
/// trajectories (in input order).
ErrorTable spatial_errors(const TrajectoryErrors& errors, std::size_t per_class_limit = 20000);

// ---------------------------------------------------------------- report

struct RocEntry {
    std::string classifier;
    int maneuver = 0;
    RocResult roc;
};

struct TauEntry {
    std::string classifier;
    int maneuver = 0;
    DetectionTimes tau;
};

struct ErrorSeries {
    std::string name;  // combination, e.g. "MLP/PW-Raw"
    ErrorTable table;
};

struct LoglikRow {
    std::string classifier;
    std::string strategy;
    double lx = 0.0, lx_norm = 0.0;
    double ly = 0.0, ly_norm = 0.0;
    bool has_x = true;
};

struct ConfidencePoint {
    std::string series;
    double conf_x = 0.0, err_x = 0.0;
    double conf_y = 0.0, err_y = 0.0;
};

struct ReportBundle {
    std::vector<RocEntry> rocs;
    std::vector<TauEntry> taus;
    std::vector<ErrorSeries> errors;
    std::vector<LoglikRow> loglik;
    std::vector<ConfidencePoint> confidence;
    double tau_bin = 0.5;
};

/// Writes roc_<class>.csv, errors_by_t.csv, tau_hist.csv, loglik_table.csv and
/// confidence_scatter.csv into `dir` (created if missing). Empty sections give
/// header-only files. Throws Error when a file cannot be written.
void emit_report(const ReportBundle& report, const std::filesystem::path& dir);

}  // namespace bpred::eval
