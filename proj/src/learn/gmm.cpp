#include "bpred/learn/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bpred/core/rng.hpp"
#include "bpred/core/types.hpp"

namespace bpred::learn {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
    double r = 0.0;
    while (x < 6.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    return r + std::log(x) - 0.5 / x -
           f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f * (1.0 / 132)))));
}

std::size_t GmmModel::dim_index(const std::string& id) const {
    auto it = std::find(dims.begin(), dims.end(), id);
    if (it == dims.end()) throw DomainError("mixture has no dimension '" + id + "'");
    return static_cast<std::size_t>(it - dims.begin());
}

void GmmModel::validate() const {
    if (weights.empty()) throw DomainError("mixture has no components");
    if (means.size() != weights.size() || covariances.size() != weights.size())
        throw DomainError("mixture component arrays differ in length");
    double s = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw DomainError("negative mixture weight");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) throw DomainError("mixture weights do not sum to 1");
    for (std::size_t k = 0; k < size(); ++k) {
        if (means[k].size() != static_cast<Eigen::Index>(dim()) || covariances[k].rows() != static_cast<Eigen::Index>(dim()) ||
            covariances[k].cols() != static_cast<Eigen::Index>(dim()))
            throw DomainError("component " + std::to_string(k) + " has wrong dimension");
        Eigen::LLT<Eigen::MatrixXd> llt(covariances[k]);
        if (llt.info() != Eigen::Success) throw DomainError("component " + std::to_string(k) + " covariance is not SPD");
    }
}

GmmDensity::GmmDensity(const GmmModel& model) {
    const std::size_t d = model.dim(), K = model.size();
    set_.resize(K, d);
    for (std::size_t k = 0; k < K; ++k) {
        Eigen::LLT<Eigen::MatrixXd> llt(model.covariances[k]);
        if (llt.info() != Eigen::Success)
            throw DomainError("component " + std::to_string(k) + ": covariance is singular");
        Eigen::MatrixXd L = llt.matrixL();
        double logdet_half = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            logdet_half += std::log(L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
            set_.means[k * d + i] = model.means[k](static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j <= i; ++j)
                set_.chols[k * d * d + i * d + j] = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        set_.scale[k] = 1.0;
        set_.log_const[k] = std::log(model.weights[k]) - 0.5 * static_cast<double>(d) * kLog2Pi - logdet_half;
    }
}

double GmmDensity::logpdf(const double* x) const {
    double out;
    kernels::mixture_logpdf_serial(set_, x, 1, &out);
    return out;
}

double GmmDensity::logpdf(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != set_.dim)
        throw DomainError("point has dimension " + std::to_string(x.size()) + ", mixture has " +
                          std::to_string(set_.dim));
    return logpdf(x.data());
}

void GmmDensity::logpdf_batch(const RowMatrix& x, std::vector<double>& out) const {
    if (static_cast<std::size_t>(x.cols()) != set_.dim) throw DomainError("batch has wrong dimension");
    out.resize(static_cast<std::size_t>(x.rows()));
    kernels::mixture_logpdf(set_, x.data(), out.size(), out.data());
}

double gmm_logpdf(const GmmModel& model, const Eigen::VectorXd& x) { return GmmDensity(model).logpdf(x); }

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Natural log of the Wishart normalizer B(W, nu) given ln|W|.
double log_wishart_norm(double logdet_w, double nu, std::size_t d) {
    const double dd = static_cast<double>(d);
    double s = 0.0;
    for (std::size_t i = 1; i <= d; ++i) s += std::lgamma(0.5 * (nu + 1.0 - static_cast<double>(i)));
    return -0.5 * nu * logdet_w - (0.5 * nu * dd * std::numbers::ln2 + 0.25 * dd * (dd - 1.0) * std::log(std::numbers::pi) + s);
}

struct Prior {
    double alpha0, beta0, nu0;
    VectorXd m0;
    MatrixXd winv0;
    double logdet_w0;
};

struct Posterior {
    std::vector<double> alpha, beta, nu;
    std::vector<VectorXd> m;
    std::vector<MatrixXd> winv;
    std::vector<Eigen::LLT<MatrixXd>> llt;
    std::vector<double> logdet_w;   // ln|W_k|
    std::vector<double> log_lambda; // E[ln|Lambda_k|]
    std::vector<double> log_pi;     // E[ln pi_k]
};

struct Stats {
    std::vector<double> nk;
    std::vector<VectorXd> xbar;
    std::vector<MatrixXd> scatter;  // sum r (x - xbar)(x - xbar)^T
};

class VbRun {
public:
    VbRun(const RowMatrix& x, const Prior& prior, std::size_t K) : xp_(&x), pp_(&prior), K_(K) {
        d_ = static_cast<std::size_t>(x.cols());
        n_ = static_cast<std::size_t>(x.rows());
        resp_.assign(n_ * K_, 0.0);
    }

    std::vector<double>& resp() { return resp_; }

    void stats_from_resp(const kernels::EStepTotals* totals) {
        st_.nk.assign(K_, 0.0);
        st_.xbar.assign(K_, VectorXd::Zero(static_cast<Eigen::Index>(d_)));
        st_.scatter.assign(K_, MatrixXd::Zero(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_)));
        std::vector<double> sum_x;
        if (totals) {
            st_.nk = totals->nk;
            sum_x = totals->sum_x;
        } else {
            sum_x.assign(K_ * d_, 0.0);
            for (std::size_t n = 0; n < n_; ++n)
                for (std::size_t k = 0; k < K_; ++k) {
                    const double r = resp_[n * K_ + k];
                    if (r == 0.0) continue;
                    st_.nk[k] += r;
                    for (std::size_t i = 0; i < d_; ++i) sum_x[k * d_ + i] += r * (*xp_)(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
                }
        }
        std::vector<double> centers(K_ * d_);
        for (std::size_t k = 0; k < K_; ++k) {
            st_.nk[k] += 10.0 * std::numeric_limits<double>::epsilon();
            for (std::size_t i = 0; i < d_; ++i) {
                centers[k * d_ + i] = sum_x[k * d_ + i] / st_.nk[k];
                st_.xbar[k](static_cast<Eigen::Index>(i)) = centers[k * d_ + i];
            }
        }
        std::vector<double> sc(K_ * d_ * d_);
        kernels::weighted_scatter(xp_->data(), n_, d_, resp_.data(), K_, centers.data(), sc.data());
        for (std::size_t k = 0; k < K_; ++k)
            for (std::size_t i = 0; i < d_; ++i)
                for (std::size_t j = 0; j < d_; ++j)
                    st_.scatter[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sc[k * d_ * d_ + i * d_ + j];
    }

    void mstep() {
        const auto& p = *pp_;
        q_.alpha.resize(K_);
        q_.beta.resize(K_);
        q_.nu.resize(K_);
        q_.m.resize(K_);
        q_.winv.resize(K_);
        q_.llt.resize(K_);
        q_.logdet_w.resize(K_);
        q_.log_lambda.resize(K_);
        q_.log_pi.resize(K_);
        double alpha_sum = 0.0;
        for (std::size_t k = 0; k < K_; ++k) {
            const double nk = st_.nk[k];
            q_.alpha[k] = p.alpha0 + nk;
            q_.beta[k] = p.beta0 + nk;
            q_.nu[k] = p.nu0 + nk;
            q_.m[k] = (p.beta0 * p.m0 + nk * st_.xbar[k]) / q_.beta[k];
            const VectorXd dm = st_.xbar[k] - p.m0;
            q_.winv[k] = p.winv0 + st_.scatter[k] + (p.beta0 * nk / (p.beta0 + nk)) * dm * dm.transpose();
            q_.llt[k].compute(q_.winv[k]);
            if (q_.llt[k].info() != Eigen::Success)
                throw DomainError("component " + std::to_string(k) + ": covariance is singular after regularization");
            const MatrixXd L = q_.llt[k].matrixL();
            double logdet_winv = 0.0;
            for (std::size_t i = 0; i < d_; ++i) logdet_winv += 2.0 * std::log(L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
            q_.logdet_w[k] = -logdet_winv;
            double ll = static_cast<double>(d_) * std::numbers::ln2 + q_.logdet_w[k];
            for (std::size_t i = 1; i <= d_; ++i) ll += digamma(0.5 * (q_.nu[k] + 1.0 - static_cast<double>(i)));
            q_.log_lambda[k] = ll;
            alpha_sum += q_.alpha[k];
        }
        const double dg = digamma(alpha_sum);
        for (std::size_t k = 0; k < K_; ++k) q_.log_pi[k] = digamma(q_.alpha[k]) - dg;
    }

    /// Full variational lower bound for the current responsibilities and posterior.
    double bound(double entropy) const {
        const auto& p = *pp_;
        const double dd = static_cast<double>(d_);
        double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, t6 = 0.0, t7 = 0.0;
        double alpha_sum = 0.0, lgamma_alpha = 0.0;
        for (std::size_t k = 0; k < K_; ++k) {
            const auto& llt = q_.llt[k];
            const double nk = st_.nk[k];
            const double tr_sw = llt.solve(st_.scatter[k]).trace();  // tr(W S) * N_k
            const VectorXd dx = st_.xbar[k] - q_.m[k];
            const double qx = dx.dot(llt.solve(dx));
            t1 += 0.5 * (nk * (q_.log_lambda[k] - dd / q_.beta[k] - dd * kLog2Pi) - q_.nu[k] * tr_sw -
                         nk * q_.nu[k] * qx);
            t2 += nk * q_.log_pi[k];
            t3 += (p.alpha0 - 1.0) * q_.log_pi[k];
            const VectorXd dm = q_.m[k] - p.m0;
            const double qm = dm.dot(llt.solve(dm));
            const double tr_w0w = llt.solve(p.winv0).trace();
            t4 += 0.5 * (dd * std::log(p.beta0 / (2.0 * std::numbers::pi)) + q_.log_lambda[k] - dd * p.beta0 / q_.beta[k] -
                         p.beta0 * q_.nu[k] * qm) +
                  0.5 * (p.nu0 - dd - 1.0) * q_.log_lambda[k] - 0.5 * q_.nu[k] * tr_w0w;
            t6 += (q_.alpha[k] - 1.0) * q_.log_pi[k];
            const double entropy_lambda = -log_wishart_norm(q_.logdet_w[k], q_.nu[k], d_) -
                                          0.5 * (q_.nu[k] - dd - 1.0) * q_.log_lambda[k] + 0.5 * q_.nu[k] * dd;
            t7 += 0.5 * q_.log_lambda[k] + 0.5 * dd * std::log(q_.beta[k] / (2.0 * std::numbers::pi)) - 0.5 * dd -
                  entropy_lambda;
            alpha_sum += q_.alpha[k];
            lgamma_alpha += std::lgamma(q_.alpha[k]);
        }
        const double Kd = static_cast<double>(K_);
        t3 += std::lgamma(Kd * p.alpha0) - Kd * std::lgamma(p.alpha0);
        t4 += Kd * log_wishart_norm(p.logdet_w0, p.nu0, d_);
        t6 += std::lgamma(alpha_sum) - lgamma_alpha;
        return t1 + t2 + t3 + t4 - entropy - t6 - t7;
    }

    double estep(kernels::EStepTotals& totals) {
        kernels::ComponentSet cs;
        cs.resize(K_, d_);
        for (std::size_t k = 0; k < K_; ++k) {
            const MatrixXd L = q_.llt[k].matrixL();
            for (std::size_t i = 0; i < d_; ++i) {
                cs.means[k * d_ + i] = q_.m[k](static_cast<Eigen::Index>(i));
                for (std::size_t j = 0; j <= i; ++j)
                    cs.chols[k * d_ * d_ + i * d_ + j] = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            cs.scale[k] = q_.nu[k];
            cs.log_const[k] = q_.log_pi[k] + 0.5 * q_.log_lambda[k] - 0.5 * static_cast<double>(d_) * kLog2Pi -
                              0.5 * static_cast<double>(d_) / q_.beta[k];
        }
        kernels::estep(cs, xp_->data(), n_, resp_.data(), totals);
        return totals.entropy;
    }

    std::size_t components() const noexcept { return K_; }

    /// Index of the component with the smallest expected count.
    std::size_t weakest() const {
        return static_cast<std::size_t>(std::min_element(q_.alpha.begin(), q_.alpha.end()) - q_.alpha.begin());
    }

    /// Drops component k from the posterior; the next E-step redistributes its rows.
    void remove_component(std::size_t k) {
        auto erase = [k](auto& v) { v.erase(v.begin() + static_cast<std::ptrdiff_t>(k)); };
        erase(q_.alpha);
        erase(q_.beta);
        erase(q_.nu);
        erase(q_.m);
        erase(q_.winv);
        erase(q_.llt);
        erase(q_.logdet_w);
        erase(q_.log_lambda);
        --K_;
        double alpha_sum = 0.0;
        for (double a : q_.alpha) alpha_sum += a;
        q_.log_pi.resize(K_);
        const double dg = digamma(alpha_sum);
        for (std::size_t j = 0; j < K_; ++j) q_.log_pi[j] = digamma(q_.alpha[j]) - dg;
    }

    GmmModel point_estimate(std::vector<std::string> dims, double min_weight) const {
        double total = 0.0;
        for (double a : q_.alpha) total += a;
        GmmModel g;
        g.dims = std::move(dims);
        for (std::size_t k = 0; k < K_; ++k) {
            const double w = q_.alpha[k] / total;
            if (w < min_weight) continue;
            g.weights.push_back(w);
            g.means.push_back(q_.m[k]);
            g.covariances.push_back(q_.winv[k] / q_.nu[k]);
        }
        if (g.weights.empty()) {
            // keep the heaviest component
            const auto k = static_cast<std::size_t>(std::max_element(q_.alpha.begin(), q_.alpha.end()) - q_.alpha.begin());
            g.weights.push_back(1.0);
            g.means.push_back(q_.m[k]);
            g.covariances.push_back(q_.winv[k] / q_.nu[k]);
        }
        double s = 0.0;
        for (double w : g.weights) s += w;
        for (double& w : g.weights) w /= s;
        return g;
    }

private:
    const RowMatrix* xp_;
    const Prior* pp_;
    std::size_t K_, d_ = 0, n_ = 0;
    std::vector<double> resp_;
    Stats st_;
    Posterior q_;
};

/// k-means++ seeding followed by a few Lloyd iterations on standardized data;
/// writes one-hot responsibilities.
void kmeans_init(const RowMatrix& x, const VectorXd& scale, std::size_t K, int iters, Rng& rng,
                 std::vector<double>& resp) {
    const std::size_t n = static_cast<std::size_t>(x.rows()), d = static_cast<std::size_t>(x.cols());
    RowMatrix z(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) z(i, j) = x(i, j) / scale(j);
    RowMatrix centers(static_cast<Eigen::Index>(K), x.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t first = rng.index(n);
    centers.row(0) = z.row(static_cast<Eigen::Index>(first));
    for (std::size_t k = 1; k < K; ++k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dist = (z.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(k - 1))).squaredNorm();
            d2[i] = std::min(d2[i], dist);
            total += d2[i];
        }
        std::size_t pick = rng.index(n);
        if (total > 0.0) {
            double u = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                u -= d2[i];
                if (u <= 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        centers.row(static_cast<Eigen::Index>(k)) = z.row(static_cast<Eigen::Index>(pick));
    }
    std::vector<std::size_t> assign(n, 0);
    for (int it = 0; it <= iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k) {
                const double dist = (z.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(k))).squaredNorm();
                if (dist < best) {
                    best = dist;
                    assign[i] = k;
                }
            }
        }
        if (it == iters) break;
        RowMatrix sums = RowMatrix::Zero(static_cast<Eigen::Index>(K), x.cols());
        std::vector<std::size_t> counts(K, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums.row(static_cast<Eigen::Index>(assign[i])) += z.row(static_cast<Eigen::Index>(i));
            ++counts[assign[i]];
        }
        for (std::size_t k = 0; k < K; ++k)
            if (counts[k]) centers.row(static_cast<Eigen::Index>(k)) = sums.row(static_cast<Eigen::Index>(k)) / static_cast<double>(counts[k]);
    }
    std::fill(resp.begin(), resp.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) resp[i * K + assign[i]] = 1.0;
    (void)d;
}

}  // namespace

GmmFitResult fit_gmm(const RowMatrix& rows, std::vector<std::string> dims, const GmmFitConfig& cfg) {
    const auto n = static_cast<std::size_t>(rows.rows());
    const auto d = static_cast<std::size_t>(rows.cols());
    if (n == 0) throw DomainError("fit_gmm: no rows");
    if (dims.size() != d) throw DomainError("fit_gmm: dimension names do not match the data");
    if (cfg.k_max < 1 || cfg.max_iter < 1 || cfg.restarts < 1) throw DomainError("fit_gmm: invalid configuration");
    if (!rows.allFinite()) throw DomainError("fit_gmm: non-finite value in data");

    Prior prior;
    prior.m0 = rows.colwise().mean().transpose();
    const RowMatrix centered = rows.rowwise() - prior.m0.transpose();
    MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    prior.winv0 = cov + cfg.reg * MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Eigen::LLT<MatrixXd> llt0(prior.winv0);
    if (llt0.info() != Eigen::Success) throw DomainError("fit_gmm: data covariance is singular");
    double logdet = 0.0;
    const MatrixXd L0 = llt0.matrixL();
    for (std::size_t i = 0; i < d; ++i) logdet += 2.0 * std::log(L0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    prior.logdet_w0 = -logdet;
    prior.beta0 = 1.0;
    prior.nu0 = static_cast<double>(d);
    prior.alpha0 = cfg.weight_concentration > 0.0 ? cfg.weight_concentration : 1.0 / cfg.k_max;

    VectorXd scale = cov.diagonal().cwiseSqrt();
    for (Eigen::Index i = 0; i < scale.size(); ++i)
        if (!(scale(i) > 0.0)) scale(i) = 1.0;

    const std::size_t K = std::min<std::size_t>(static_cast<std::size_t>(cfg.k_max), n);
    const double min_weight = cfg.prune / cfg.k_max;
    GmmFitResult best;
    bool have_best = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        VbRun run(rows, prior, K);
        kmeans_init(rows, scale, K, cfg.kmeans_iter, rng, run.resp());
        run.stats_from_resp(nullptr);
        run.mstep();
        GmmFitResult res;
        double prev = run.bound(0.0) / static_cast<double>(n);
        res.bound_trace.push_back(prev);
        res.trace_components.push_back(run.components());
        kernels::EStepTotals totals;
        // Coordinate ascent until the bound stalls; returns the final bound.
        auto ascend = [&](VbRun& vb, int max_iter, double start, double accept_above, bool record) {
            double last = start;
            int stalled = 0;
            for (int it = 1; it <= max_iter; ++it) {
                const double entropy = vb.estep(totals);
                vb.stats_from_resp(&totals);
                vb.mstep();
                const double cur = vb.bound(entropy) / static_cast<double>(n);
                if (record) {
                    res.bound_trace.push_back(cur);
                    res.trace_components.push_back(vb.components());
                }
                ++res.iterations;
                stalled = (cur - last < cfg.tol) ? stalled + 1 : 0;
                last = cur;
                if (stalled >= cfg.patience || cur > accept_above) break;
            }
            return last;
        };
        prev = ascend(run, cfg.max_iter, prev, std::numeric_limits<double>::infinity(), true);
        res.converged = res.iterations < cfg.max_iter;

        // Structure search: drop the weakest component while that raises the
        // bound. Trials and the resumed ascents share one budget of max_iter.
        int trial_budget = cfg.max_iter;
        while (run.components() > 1 && trial_budget > 0) {
            VbRun trial = run;
            trial.remove_component(trial.weakest());
            const int before = res.iterations;
            const double b = ascend(trial, std::min(trial_budget, cfg.deletion_iter), -std::numeric_limits<double>::infinity(),
                                    prev + cfg.tol, false);
            trial_budget -= res.iterations - before;
            if (!(b > prev + cfg.tol)) break;
            run = std::move(trial);
            const double start = b;
            res.bound_trace.push_back(b);
            res.trace_components.push_back(run.components());
            const int resumed = res.iterations;
            prev = ascend(run, trial_budget, start, std::numeric_limits<double>::infinity(), true);
            trial_budget -= res.iterations - resumed;
        }
        res.bound = prev;
        if (!have_best || res.bound > best.bound) {
            res.model = run.point_estimate(dims, min_weight);
            best = std::move(res);
            have_best = true;
        }
    }
    return best;
}

nlohmann::json gmm_to_json(const GmmModel& m) {
    nlohmann::json j;
    j["dims"] = m.dims;
    j["weights"] = m.weights;
    auto means = nlohmann::json::array();
    auto covs = nlohmann::json::array();
    for (std::size_t k = 0; k < m.size(); ++k) {
        means.push_back(std::vector<double>(m.means[k].data(), m.means[k].data() + m.means[k].size()));
        auto c = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.covariances[k].rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(m.covariances[k].cols()));
            for (Eigen::Index j2 = 0; j2 < m.covariances[k].cols(); ++j2) row[static_cast<std::size_t>(j2)] = m.covariances[k](i, j2);
            c.push_back(row);
        }
        covs.push_back(c);
    }
    j["means"] = means;
    j["covariances"] = covs;
    return j;
}

GmmModel gmm_from_json(const nlohmann::json& j) {
    GmmModel m;
    m.dims = j.at("dims").get<std::vector<std::string>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    const auto d = static_cast<Eigen::Index>(m.dims.size());
    for (const auto& mu : j.at("means")) {
        const auto v = mu.get<std::vector<double>>();
        if (static_cast<Eigen::Index>(v.size()) != d) throw DomainError("mixture mean has wrong dimension");
        m.means.push_back(Eigen::Map<const VectorXd>(v.data(), d));
    }
    for (const auto& c : j.at("covariances")) {
        MatrixXd cov(d, d);
        if (static_cast<Eigen::Index>(c.size()) != d) throw DomainError("mixture covariance has wrong dimension");
        for (Eigen::Index i = 0; i < d; ++i) {
            const auto row = c[static_cast<std::size_t>(i)].get<std::vector<double>>();
            if (static_cast<Eigen::Index>(row.size()) != d) throw DomainError("mixture covariance has wrong dimension");
            for (Eigen::Index k = 0; k < d; ++k) cov(i, k) = row[static_cast<std::size_t>(k)];
        }
        m.covariances.push_back(cov);
    }
    m.validate();
    return m;
}

}  // namespace bpred::learn
