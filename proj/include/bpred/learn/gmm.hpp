#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "bpred/kernels/mixture.hpp"

namespace bpred::learn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Weighted full-covariance Gaussian mixture over named dimensions.
struct GmmModel {
    std::vector<std::string> dims;
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;

    std::size_t size() const noexcept { return weights.size(); }
    std::size_t dim() const noexcept { return dims.size(); }
    /// Index of a dimension id; throws DomainError if absent.
    std::size_t dim_index(const std::string& id) const;
    /// Checks the simplex and SPD invariants.
    void validate() const;
};

/// Precomputed Cholesky factors for repeated density evaluation.
class GmmDensity {
public:
    explicit GmmDensity(const GmmModel& model);
    double logpdf(const double* x) const;
    double logpdf(const Eigen::VectorXd& x) const;
    /// Row-wise log density of an n x d row-major block.
    void logpdf_batch(const RowMatrix& x, std::vector<double>& out) const;
    std::size_t dim() const noexcept { return set_.dim; }

private:
    kernels::ComponentSet set_;
};

double gmm_logpdf(const GmmModel& model, const Eigen::VectorXd& x);

struct GmmFitConfig {
    int k_max = 50;
    int max_iter = 500;
    double tol = 1e-6;       // per-sample bound improvement counted as stalled
    int patience = 3;        // consecutive stalled iterations before stopping
    int restarts = 3;
    double reg = 1e-6;       // added to the covariance scale on the diagonal
    double prune = 1e-3;     // components below prune / k_max weight are dropped
    double weight_concentration = 0.0;  // Dirichlet prior per component; <= 0 means 1 / k_max
    int kmeans_iter = 10;
    int deletion_iter = 100;  // iteration cap of one component-deletion trial
    std::uint64_t seed = 0;
};

struct GmmFitResult {
    GmmModel model;
    std::vector<double> bound_trace;  // per-sample variational bound after each iteration
    std::vector<std::size_t> trace_components;  // component count behind each trace entry
    double bound = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Variational Bayesian fit of a Gaussian mixture (Dirichlet weight prior,
/// Gauss-Wishart component prior centred on the data moments). Components
/// whose expected weight stays below prune / k_max are removed from the
/// returned point-estimate mixture. After convergence the weakest component is
/// deleted and the fit resumed for as long as that raises the bound. Best of
/// `restarts` k-means++ seeded runs.
GmmFitResult fit_gmm(const RowMatrix& rows, std::vector<std::string> dims, const GmmFitConfig& config);

nlohmann::json gmm_to_json(const GmmModel& model);
GmmModel gmm_from_json(const nlohmann::json& j);

/// Digamma function for positive arguments.
double digamma(double x);

}  // namespace bpred::learn
