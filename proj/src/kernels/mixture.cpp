#include "bpred/kernels/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bpred::kernels {

void ComponentSet::resize(std::size_t k, std::size_t d) {
    dim = d;
    means.assign(k * d, 0.0);
    chols.assign(k * d * d, 0.0);
    scale.assign(k, 1.0);
    log_const.assign(k, 0.0);
}

namespace {

/// Log terms of one row against all components; returns their log-sum-exp.
double row_terms(const ComponentSet& c, const double* row, double* terms, double* work) {
    const std::size_t d = c.dim, K = c.size();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
        const double* m = &c.means[k * d];
        const double* L = &c.chols[k * d * d];
        double q = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double v = row[i] - m[i];
            for (std::size_t j = 0; j < i; ++j) v -= L[i * d + j] * work[j];
            v /= L[i * d + i];
            work[i] = v;
            q += v * v;
        }
        terms[k] = c.log_const[k] - 0.5 * c.scale[k] * q;
        mx = std::max(mx, terms[k]);
    }
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += std::exp(terms[k] - mx);
    return mx + std::log(s);
}

void logpdf_range(const ComponentSet& c, const double* x, std::size_t lo, std::size_t hi, double* out) {
    std::vector<double> terms(c.size()), work(c.dim);
    for (std::size_t n = lo; n < hi; ++n) out[n] = row_terms(c, x + n * c.dim, terms.data(), work.data());
}

/// E-step over rows [lo, hi) accumulating into the given partial totals.
void estep_range(const ComponentSet& c, const double* x, std::size_t lo, std::size_t hi, double* resp,
                 double* nk, double* sum_x, double& entropy, double& loglik) {
    const std::size_t d = c.dim, K = c.size();
    std::vector<double> work(d);
    for (std::size_t n = lo; n < hi; ++n) {
        double* r = resp + n * K;
        const double* row = x + n * d;
        const double lse = row_terms(c, row, r, work.data());
        loglik += lse;
        for (std::size_t k = 0; k < K; ++k) {
            const double lr = r[k] - lse;
            const double v = std::exp(lr);
            r[k] = v;
            if (v > 0.0) entropy += v * lr;
            nk[k] += v;
            for (std::size_t i = 0; i < d; ++i) sum_x[k * d + i] += v * row[i];
        }
    }
}

void scatter_range(const double* x, std::size_t lo, std::size_t hi, std::size_t d, const double* resp,
                   std::size_t K, const double* centers, double* out) {
    std::vector<double> diff(d);
    for (std::size_t n = lo; n < hi; ++n) {
        const double* row = x + n * d;
        for (std::size_t k = 0; k < K; ++k) {
            const double r = resp[n * K + k];
            if (r == 0.0) continue;
            for (std::size_t i = 0; i < d; ++i) diff[i] = row[i] - centers[k * d + i];
            double* o = out + k * d * d;
            for (std::size_t i = 0; i < d; ++i) {
                const double ri = r * diff[i];
                for (std::size_t j = 0; j <= i; ++j) o[i * d + j] += ri * diff[j];
            }
        }
    }
}

void symmetrize(double* out, std::size_t K, std::size_t d) {
    for (std::size_t k = 0; k < K; ++k) {
        double* o = out + k * d * d;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) o[i * d + j] = o[j * d + i];
    }
}

std::size_t chunk_count(std::size_t n) { return (n + kChunkRows - 1) / kChunkRows; }

}  // namespace

void mixture_logpdf_serial(const ComponentSet& c, const double* x, std::size_t n, double* out) {
    logpdf_range(c, x, 0, n, out);
}

void mixture_logpdf(const ComponentSet& c, const double* x, std::size_t n, double* out) {
    const auto chunks = static_cast<std::ptrdiff_t>(chunk_count(n));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < chunks; ++b) {
        const auto lo = static_cast<std::size_t>(b) * kChunkRows;
        logpdf_range(c, x, lo, std::min(n, lo + kChunkRows), out);
    }
}

void estep_serial(const ComponentSet& c, const double* x, std::size_t n, double* resp, EStepTotals& t) {
    const std::size_t d = c.dim, K = c.size();
    t.nk.assign(K, 0.0);
    t.sum_x.assign(K * d, 0.0);
    t.entropy = 0.0;
    t.loglik = 0.0;
    estep_range(c, x, 0, n, resp, t.nk.data(), t.sum_x.data(), t.entropy, t.loglik);
}

void estep(const ComponentSet& c, const double* x, std::size_t n, double* resp, EStepTotals& t) {
    const std::size_t d = c.dim, K = c.size();
    const std::size_t chunks = chunk_count(n);
    const std::size_t stride = K + K * d + 2;
    std::vector<double> partial(chunks * stride, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(chunks); ++b) {
        const auto lo = static_cast<std::size_t>(b) * kChunkRows;
        double* p = &partial[static_cast<std::size_t>(b) * stride];
        estep_range(c, x, lo, std::min(n, lo + kChunkRows), resp, p, p + K, p[K + K * d], p[K + K * d + 1]);
    }
    t.nk.assign(K, 0.0);
    t.sum_x.assign(K * d, 0.0);
    t.entropy = 0.0;
    t.loglik = 0.0;
    for (std::size_t b = 0; b < chunks; ++b) {
        const double* p = &partial[b * stride];
        for (std::size_t k = 0; k < K; ++k) t.nk[k] += p[k];
        for (std::size_t i = 0; i < K * d; ++i) t.sum_x[i] += p[K + i];
        t.entropy += p[K + K * d];
        t.loglik += p[K + K * d + 1];
    }
}

void weighted_scatter_serial(const double* x, std::size_t n, std::size_t d, const double* resp, std::size_t K,
                             const double* centers, double* out) {
    std::fill(out, out + K * d * d, 0.0);
    scatter_range(x, 0, n, d, resp, K, centers, out);
    symmetrize(out, K, d);
}

void weighted_scatter(const double* x, std::size_t n, std::size_t d, const double* resp, std::size_t K,
                      const double* centers, double* out) {
    const std::size_t chunks = chunk_count(n);
    const std::size_t stride = K * d * d;
    std::vector<double> partial(chunks * stride, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(chunks); ++b) {
        const auto lo = static_cast<std::size_t>(b) * kChunkRows;
        scatter_range(x, lo, std::min(n, lo + kChunkRows), d, resp, K, centers,
                      &partial[static_cast<std::size_t>(b) * stride]);
    }
    std::fill(out, out + stride, 0.0);
    for (std::size_t b = 0; b < chunks; ++b)
        for (std::size_t i = 0; i < stride; ++i) out[i] += partial[b * stride + i];
    symmetrize(out, K, d);
}

}  // namespace bpred::kernels
