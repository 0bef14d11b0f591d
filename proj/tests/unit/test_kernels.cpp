#include <doctest.h>

#include <omp.h>

#include "bpred/core/rng.hpp"
#include "bpred/kernels/mixture.hpp"

using namespace bpred;

namespace {

kernels::ComponentSet random_set(std::size_t k, std::size_t d, Rng& rng) {
    kernels::ComponentSet c;
    c.resize(k, d);
    for (auto& v : c.means) v = rng.normal(0, 3);
    for (std::size_t q = 0; q < k; ++q) {
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                c.chols[q * d * d + i * d + j] = i == j ? rng.uniform(0.5, 2.0) : rng.normal(0, 0.3);
        c.scale[q] = rng.uniform(0.5, 1.5);
        c.log_const[q] = rng.normal(-2, 1);
    }
    return c;
}

std::vector<double> random_rows(std::size_t n, std::size_t d, Rng& rng) {
    std::vector<double> x(n * d);
    for (auto& v : x) v = rng.normal(0, 4);
    return x;
}

struct Threads {
    int saved = omp_get_max_threads();
    explicit Threads(int n) { omp_set_num_threads(n); }
    ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

bool near(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-12 * (1 + std::abs(a[i]))) return false;
    return true;
}

TEST_CASE("parallel kernels agree with the serial reference") {
    // row-wise outputs are identical; chunked reductions only reassociate sums
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 1 + rng.index(4), k = 1 + rng.index(6);
        const std::size_t n = rng.index(3 * kernels::kChunkRows + 17);
        const auto c = random_set(k, d, rng);
        const auto x = random_rows(n, d, rng);
        INFO("n " << n << " d " << d << " k " << k);

        std::vector<double> a(n), b(n);
        kernels::mixture_logpdf_serial(c, x.data(), n, a.data());
        kernels::mixture_logpdf(c, x.data(), n, b.data());
        CHECK(a == b);

        std::vector<double> ra(n * k), rb(n * k);
        kernels::EStepTotals ta, tb;
        kernels::estep_serial(c, x.data(), n, ra.data(), ta);
        kernels::estep(c, x.data(), n, rb.data(), tb);
        CHECK(ra == rb);
        CHECK(near(ta.nk, tb.nk));
        CHECK(near(ta.sum_x, tb.sum_x));
        CHECK(near({ta.entropy, ta.loglik}, {tb.entropy, tb.loglik}));

        std::vector<double> sa(k * d * d), sb(k * d * d);
        kernels::weighted_scatter_serial(x.data(), n, d, ra.data(), k, c.means.data(), sa.data());
        kernels::weighted_scatter(x.data(), n, d, ra.data(), k, c.means.data(), sb.data());
        CHECK(near(sa, sb));
    }
}

TEST_CASE("parallel results do not depend on the thread count") {
    Rng rng(33);
    const std::size_t d = 3, k = 5, n = 5 * kernels::kChunkRows + 100;
    const auto c = random_set(k, d, rng);
    const auto x = random_rows(n, d, rng);
    const auto run = [&](int threads) {
        Threads guard(threads);
        std::vector<double> resp(n * k), scatter(k * d * d);
        kernels::EStepTotals t;
        kernels::estep(c, x.data(), n, resp.data(), t);
        kernels::weighted_scatter(x.data(), n, d, resp.data(), k, c.means.data(), scatter.data());
        std::vector<double> all = t.nk;
        all.insert(all.end(), t.sum_x.begin(), t.sum_x.end());
        all.push_back(t.entropy);
        all.push_back(t.loglik);
        all.insert(all.end(), scatter.begin(), scatter.end());
        return all;
    };
    const auto one = run(1);
    CHECK(run(2) == one);
    CHECK(run(4) == one);
}

TEST_CASE("responsibilities sum to one per row") {
    Rng rng(32);
    const std::size_t n = 500, d = 2, k = 4;
    const auto c = random_set(k, d, rng);
    const auto x = random_rows(n, d, rng);
    std::vector<double> r(n * k);
    kernels::EStepTotals t;
    kernels::estep(c, x.data(), n, r.data(), t);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t q = 0; q < k; ++q) s += r[i * k + q];
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
    for (double v : t.nk) total += v;
    CHECK(std::abs(total - static_cast<double>(n)) < 1e-9);
}

}  // TEST_SUITE kernels
