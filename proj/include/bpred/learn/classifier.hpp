#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpred/learn/gmm.hpp"

namespace bpred::learn {

enum class Algo { GNB, RF, MLP };
std::string to_string(Algo a);
Algo parse_algo(const std::string& s);

/// Hyperparameters of all three algorithms; each uses its own subset.
struct Hyper {
    double alpha = 0.02;  // MLP step size
    int n_hidd = 27;
    int n_iter = 800;     // epochs
    int batch = 200;      // MLP mini-batch rows
    int n_tree = 128;
    int n_splt = 16;      // splits per tree
    int n_smpl = 100;     // nodes with fewer samples stay leaves
    int gnb_k_max = 10;   // mixture components per class and feature
    int gnb_restarts = 1;
    int gnb_max_rows = 2000;  // per class; larger classes are subsampled for the 1-D fits

    bool operator==(const Hyper&) const = default;
};

/// Labeled design matrix; labels are maneuver indices 0..2 (LCL, FLW, LCR).
struct LabeledData {
    RowMatrix x;
    std::vector<int> y;
    std::size_t size() const noexcept { return y.size(); }
};

LabeledData concat(const std::vector<const LabeledData*>& parts);
LabeledData select_columns(const LabeledData& d, const std::vector<std::size_t>& columns);
LabeledData subsample(const LabeledData& d, std::size_t max_rows, std::uint64_t seed);

/// Per-feature z-score. Zero-variance columns pass through unchanged and are
/// listed in `passthrough`.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<std::size_t> passthrough;

    void apply(double* row) const;
    RowMatrix apply(const RowMatrix& x) const;
};
Scaler fit_scaler(const RowMatrix& x);
Scaler identity_scaler(std::size_t dim);

struct GnbModel {
    // densities[c][f]: 1-D mixture of feature f given class c
    std::array<std::vector<GmmModel>, 3> densities;

    /// Per-class log likelihood contributions, out[c] is n x p.
    std::array<RowMatrix, 3> feature_loglik(const RowMatrix& x) const;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;     // x[feature] <= threshold
    int right = -1;
    std::array<double, 3> proba{};
};

struct RfModel {
    std::vector<std::vector<TreeNode>> trees;
};

struct MlpModel {
    Eigen::MatrixXd w1;  // p x h
    Eigen::RowVectorXd b1;
    Eigen::MatrixXd w2;  // h x 3
    Eigen::RowVectorXd b2;
};

struct ClassifierModel {
    Algo algo = Algo::RF;
    std::vector<std::string> feature_ids;
    Hyper params;
    Scaler scaler;
    GnbModel gnb;
    RfModel rf;
    MlpModel mlp;

    /// Class probabilities for one row given in feature_ids order.
    std::array<double, 3> predict_proba(const double* row) const;
    /// n x 3 probabilities (LCL, FLW, LCR).
    RowMatrix predict_proba(const RowMatrix& x) const;
};

/// Trains on rows whose columns follow `feature_ids`. Throws Error on a NaN loss
/// (naming the epoch) or a class without rows.
ClassifierModel fit_classifier(Algo algo, const Hyper& params, std::vector<std::string> feature_ids,
                               const LabeledData& train, std::uint64_t seed);

/// Class assignment used for accuracy metrics: argmax with ties to the lower index.
int argmax(const std::array<double, 3>& p);

nlohmann::json hyper_to_json(const Hyper& h);
nlohmann::json classifier_to_json(const ClassifierModel& m);
ClassifierModel classifier_from_json(const nlohmann::json& j);

// Components exposed for direct testing.
GnbModel fit_gnb(const LabeledData& train, const Hyper& params, std::uint64_t seed);
std::array<double, 3> gnb_posterior(const std::array<double, 3>& class_loglik);
RfModel fit_rf(const LabeledData& train, const Hyper& params, std::uint64_t seed);
std::vector<TreeNode> fit_tree(const RowMatrix& x, const std::vector<int>& y, const std::vector<std::size_t>& rows,
                               const Hyper& params, std::uint64_t seed);
MlpModel init_mlp(std::size_t inputs, int hidden, std::uint64_t seed);
/// Mean cross-entropy and its gradient over a batch (rows already scaled).
double mlp_loss_grad(const MlpModel& m, const RowMatrix& x, const std::vector<int>& y, MlpModel* grad);
RowMatrix mlp_forward(const MlpModel& m, const RowMatrix& x);
MlpModel fit_mlp(const RowMatrix& scaled_x, const std::vector<int>& y, const Hyper& params, std::uint64_t seed);

/// Grid search over cells by mean validation balanced accuracy, rotating the
/// validation fold. Cells are ranked small to large first so ties keep the
/// smaller model. A single cell is returned without evaluation (score NaN)
/// unless `evaluate_single` asks for its score. `max_rotations` > 0 validates
/// on only the first that many folds.
struct GridResult {
    Hyper best;
    std::vector<Hyper> cells;     // in evaluation order
    std::vector<double> scores;   // mean validation BACC per cell
};
GridResult grid_search(Algo algo, std::vector<Hyper> cells, const std::vector<LabeledData>& folds,
                       std::uint64_t seed, bool evaluate_single = false, std::size_t max_rotations = 0);

/// Model-size ordering key used for tie-breaking in grid search.
bool smaller_model(Algo algo, const Hyper& a, const Hyper& b);

}  // namespace bpred::learn
