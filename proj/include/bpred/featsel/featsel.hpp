#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpred/core/types.hpp"
#include "bpred/learn/classifier.hpp"

namespace bpred::featsel {

struct FeatureSet {
    char variant = 'A';
    std::vector<std::string> ids;  // catalog order
    nlohmann::json provenance = nlohmann::json::object();
};

nlohmann::json to_json(const FeatureSet& fs);
FeatureSet feature_set_from_json(const nlohmann::json& j);

/// Rank correlation with average ranks for ties. Throws DomainError on
/// constant input or fewer than two values.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Correlation target: min(ttlcl, ttlcr), with infinite and long times capped.
double ttlc_target(double ttlcl, double ttlcr, double cap = 10.0);

/// Columns of a row matrix as vectors plus the correlation target.
struct CorrelationData {
    learn::RowMatrix x;          // n x p, columns in catalog order
    std::vector<double> target;  // TTLC per row
};

/// True when every value of column j equals the first one.
bool is_constant(const learn::RowMatrix& x, Eigen::Index j);

/// Variant A: the full catalog.
FeatureSet superset(const Catalog& catalog);

/// Variant B: features with |rho(feature, TTLC)| >= theta. Constant features
/// have no defined correlation and are skipped.
FeatureSet select_by_threshold(const CorrelationData& data, const Catalog& catalog, double theta = 0.15);

/// Merit from the averaged absolute correlations of an n-feature set.
double cfs_merit(std::size_t n, double mean_cf, double mean_ff);
/// Merit of the subset `members` given |rho_cf| per feature and the |rho_ff| matrix.
double cfs_merit(const std::vector<std::size_t>& members, const std::vector<double>& rho_cf,
                 const std::vector<std::vector<double>>& rho_ff);

/// Absolute rank correlations of one data fold.
struct FoldCorrelations {
    std::vector<double> cf;               // per feature
    std::vector<std::vector<double>> ff;  // p x p
    std::vector<char> constant;           // per feature
};
/// Constant columns get zero correlations throughout.
FoldCorrelations fold_correlations(const CorrelationData& data);

/// Variant C: greedy backward elimination on the mean merit over the folds.
/// A removal is taken when it does not lower the mean merit; candidates with
/// equal merit go to the lower catalog index. Constant features are excluded
/// from the start set.
FeatureSet cfs_backward_select(const std::vector<FoldCorrelations>& folds, const Catalog& catalog);

struct WrapperConfig {
    std::size_t max_train_rows = 0;  // 0 keeps all rows of the training fold
    std::uint64_t seed = 1;
};

/// Variant D: backward elimination by validation BACC of the classifier
/// trained on `train` and scored on `val` (both in catalog column order),
/// starting from `start`. Never goes below one feature.
FeatureSet wrapper_backward_select(learn::Algo algo, const learn::Hyper& params, const learn::LabeledData& train,
                                   const learn::LabeledData& val, const Catalog& catalog,
                                   const std::vector<std::string>& start, const WrapperConfig& cfg);

}  // namespace bpred::featsel
