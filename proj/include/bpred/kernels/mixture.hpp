#pragma once

#include <cstddef>
#include <vector>

namespace bpred::kernels {

/// Flattened Gaussian-like components sharing one dimension d. Component k
/// contributes log_const[k] - scale[k]/2 * |L_k^{-1} (x - mean_k)|^2 with L_k
/// lower triangular (row-major d x d). Plain Gaussians use scale 1 and the
/// Cholesky factor of the covariance; the variational E-step uses its own
/// constants and scale.
struct ComponentSet {
    std::size_t dim = 0;
    std::vector<double> means;      // K * d
    std::vector<double> chols;      // K * d * d
    std::vector<double> scale;      // K
    std::vector<double> log_const;  // K

    std::size_t size() const noexcept { return scale.size(); }
    void resize(std::size_t k, std::size_t d);
};

/// Rows handled per parallel work unit. Fixed so that reductions combine the
/// same partial sums in the same order for any thread count.
inline constexpr std::size_t kChunkRows = 1024;

/// Per-row log-sum-exp of the component log terms. `x` is n x d row-major.
void mixture_logpdf_serial(const ComponentSet& c, const double* x, std::size_t n, double* out);
void mixture_logpdf(const ComponentSet& c, const double* x, std::size_t n, double* out);

struct EStepTotals {
    std::vector<double> nk;     // K
    std::vector<double> sum_x;  // K * d
    double entropy = 0.0;       // sum r ln r
    double loglik = 0.0;        // sum of row log-sum-exp
};

/// Responsibilities (n x K row-major) and their first-order statistics.
void estep_serial(const ComponentSet& c, const double* x, std::size_t n, double* resp, EStepTotals& totals);
void estep(const ComponentSet& c, const double* x, std::size_t n, double* resp, EStepTotals& totals);

/// Weighted scatter sum_n r_nk (x_n - c_k)(x_n - c_k)^T for every k, output K * d * d.
void weighted_scatter_serial(const double* x, std::size_t n, std::size_t d, const double* resp, std::size_t k,
                             const double* centers, double* out);
void weighted_scatter(const double* x, std::size_t n, std::size_t d, const double* resp, std::size_t k,
                      const double* centers, double* out);

}  // namespace bpred::kernels
