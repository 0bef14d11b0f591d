#include "bpred/predict/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bpred/sim/simulator.hpp"

namespace bpred::predict {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double log_sum_exp(const std::vector<double>& v) {
    double mx = -kInf;
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace

// ---------------------------------------------------------------- conditioning

Conditioner::Conditioner(const GmmModel& model, const std::vector<std::string>& inputs) : inputs_(inputs) {
    const std::size_t d = model.dim();
    std::vector<std::size_t> in_idx, out_idx;
    std::vector<char> is_input(d, 0);
    for (const auto& id : inputs) {
        const auto i = model.dim_index(id);
        if (is_input[i]) throw DomainError("conditioning input '" + id + "' listed twice");
        is_input[i] = 1;
        in_idx.push_back(i);
    }
    for (std::size_t i = 0; i < d; ++i)
        if (!is_input[i]) {
            out_idx.push_back(i);
            outputs_.push_back(model.dims[i]);
        }
    if (out_idx.empty()) throw DomainError("conditioning leaves no output dimension");
    const auto ni = static_cast<Eigen::Index>(in_idx.size());
    const auto no = static_cast<Eigen::Index>(out_idx.size());
    for (std::size_t k = 0; k < model.size(); ++k) {
        const auto& mu = model.means[k];
        const auto& cov = model.covariances[k];
        Component c;
        c.log_weight = std::log(model.weights[k]);
        c.mean_in.resize(ni);
        c.mean_out.resize(no);
        Eigen::MatrixXd s_ii(ni, ni), s_oi(no, ni), s_oo(no, no);
        for (Eigen::Index a = 0; a < ni; ++a) {
            c.mean_in(a) = mu(static_cast<Eigen::Index>(in_idx[static_cast<std::size_t>(a)]));
            for (Eigen::Index b = 0; b < ni; ++b)
                s_ii(a, b) = cov(static_cast<Eigen::Index>(in_idx[static_cast<std::size_t>(a)]),
                                 static_cast<Eigen::Index>(in_idx[static_cast<std::size_t>(b)]));
        }
        for (Eigen::Index a = 0; a < no; ++a) {
            const auto oa = static_cast<Eigen::Index>(out_idx[static_cast<std::size_t>(a)]);
            c.mean_out(a) = mu(oa);
            for (Eigen::Index b = 0; b < ni; ++b)
                s_oi(a, b) = cov(oa, static_cast<Eigen::Index>(in_idx[static_cast<std::size_t>(b)]));
            for (Eigen::Index b = 0; b < no; ++b)
                s_oo(a, b) = cov(oa, static_cast<Eigen::Index>(out_idx[static_cast<std::size_t>(b)]));
        }
        if (ni > 0) {
            Eigen::LLT<Eigen::MatrixXd> llt(s_ii);
            if (llt.info() != Eigen::Success)
                throw DomainError("input covariance of component " + std::to_string(k) + " is singular");
            c.chol_in = llt.matrixL();
            // gain^T = Sigma_ii^-1 Sigma_io
            c.gain = llt.solve(s_oi.transpose()).transpose();
            c.cov_out = s_oo - c.gain * s_oi.transpose();
            c.cov_out = 0.5 * (c.cov_out + c.cov_out.transpose());
            c.log_norm_in = -0.5 * static_cast<double>(ni) * kLog2Pi -
                            c.chol_in.diagonal().array().log().sum();
        } else {
            c.gain.resize(no, 0);
            c.cov_out = s_oo;
            c.log_norm_in = 0.0;
        }
        comps_.push_back(std::move(c));
    }
}

ConditionalMixture Conditioner::condition(const double* given) const {
    const auto ni = static_cast<Eigen::Index>(inputs_.size());
    const Eigen::Map<const Eigen::VectorXd> x(given, ni);
    ConditionalMixture out;
    std::vector<double> logw(comps_.size());
    out.means.resize(comps_.size());
    out.covariances.resize(comps_.size());
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        const auto& c = comps_[k];
        if (ni > 0) {
            const Eigen::VectorXd diff = x - c.mean_in;
            const Eigen::VectorXd z = c.chol_in.triangularView<Eigen::Lower>().solve(diff);
            logw[k] = c.log_weight + c.log_norm_in - 0.5 * z.squaredNorm();
            out.means[k] = c.mean_out + c.gain * diff;
        } else {
            logw[k] = c.log_weight;
            out.means[k] = c.mean_out;
        }
        out.covariances[k] = c.cov_out;
    }
    const double lse = log_sum_exp(logw);
    if (!std::isfinite(lse)) throw DomainError("conditioning input has zero density under every component");
    out.weights.resize(comps_.size());
    for (std::size_t k = 0; k < comps_.size(); ++k) out.weights[k] = std::exp(logw[k] - lse);
    return out;
}

ConditionalMixture Conditioner::condition(const std::vector<double>& given) const {
    if (given.size() != inputs_.size())
        throw DomainError("conditioning expects " + std::to_string(inputs_.size()) + " inputs, got " +
                          std::to_string(given.size()));
    return condition(given.data());
}

ConditionalMixture gmr_condition(const GmmModel& model, const std::map<std::string, double>& given) {
    std::vector<std::string> ids;
    std::vector<double> values;
    // keep the model's dimension order so results do not depend on map order
    for (const auto& d : model.dims) {
        const auto it = given.find(d);
        if (it == given.end()) continue;
        ids.push_back(d);
        values.push_back(it->second);
    }
    if (ids.size() != given.size()) {
        for (const auto& [k, v] : given) model.dim_index(k);  // throws with the unknown id
    }
    return Conditioner(model, ids).condition(values);
}

// ---------------------------------------------------------------- 1-D distributions

double PositionDistribution::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) m += weights[k] * means[k];
    return m;
}

double PositionDistribution::variance() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) v += weights[k] * (variances[k] + (means[k] - m) * (means[k] - m));
    return std::max(v, 0.0);
}

double PositionDistribution::logpdf(double v) const {
    std::vector<double> terms;
    terms.reserve(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] <= 0.0) continue;
        const double d = v - means[k];
        terms.push_back(std::log(weights[k]) - 0.5 * (kLog2Pi + std::log(variances[k]) + d * d / variances[k]));
    }
    return log_sum_exp(terms);
}

void PositionDistribution::shift(double by) {
    for (auto& m : means) m += by;
}

void PositionDistribution::validate() const {
    if (weights.size() != means.size() || weights.size() != variances.size())
        throw DomainError("position distribution arrays differ in length");
    double s = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] < 0.0) throw DomainError("negative mixture weight");
        if (!(variances[k] > 0.0)) throw DomainError("non-positive component variance");
        s += weights[k];
    }
    if (std::abs(s - 1.0) > 1e-9) throw DomainError("mixture weights do not sum to one");
}

PositionDistribution to_position(const ConditionalMixture& m) {
    PositionDistribution p;
    for (std::size_t k = 0; k < m.weights.size(); ++k) {
        if (m.means[k].size() != 1) throw DomainError("position distribution needs a single output dimension");
        p.weights.push_back(m.weights[k]);
        p.means.push_back(m.means[k](0));
        p.variances.push_back(m.covariances[k](0, 0));
    }
    return p;
}

// ---------------------------------------------------------------- gating

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Raw: return "Raw";
        case Strategy::WTA: return "WTA";
        case Strategy::PWRaw: return "PW-Raw";
        case Strategy::IGMM: return "I-GMM";
        case Strategy::Labels: return "Labels";
        case Strategy::Priors: return "Priors";
        case Strategy::NOCLF: return "NOCLF";
    }
    return "?";
}

Strategy parse_strategy(const std::string& s) {
    for (auto st : kStrategies)
        if (to_string(st) == s) return st;
    if (s == "PWRaw") return Strategy::PWRaw;
    if (s == "IGMM") return Strategy::IGMM;
    throw DomainError("unknown strategy '" + s + "'");
}

Probs gate_weights(Strategy s, const Probs& probs, Maneuver label, const Probs& priors) {
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("gate input is not a probability vector");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DomainError("gate input does not sum to one");
    switch (s) {
        case Strategy::Raw: return probs;
        case Strategy::WTA: {
            // ties resolve to FLW first, then LCL
            const double mx = std::max({probs[0], probs[1], probs[2]});
            Probs w{};
            if (probs[1] == mx)
                w[1] = 1.0;
            else if (probs[0] == mx)
                w[0] = 1.0;
            else
                w[2] = 1.0;
            return w;
        }
        case Strategy::PWRaw: {
            Probs w{};
            double z = 0.0;
            for (std::size_t m = 0; m < 3; ++m) z += w[m] = probs[m] * priors[m];
            if (!(z > 0.0)) throw DomainError("prior-weighted probabilities vanish");
            for (auto& v : w) v /= z;
            return w;
        }
        case Strategy::Labels: {
            Probs w{};
            w[index_of(label)] = 1.0;
            return w;
        }
        case Strategy::Priors: return priors;
        case Strategy::IGMM:
        case Strategy::NOCLF: break;
    }
    throw DomainError("strategy " + to_string(s) + " does not use gate weights");
}

double cv_prediction(double x0, double v_x, double t) { return x0 + v_x * t; }

// ---------------------------------------------------------------- inputs

StartInputs start_inputs(const Catalog& catalog, const std::vector<double>& f) {
    if (f.size() != catalog.size()) throw DomainError("feature frame does not match the catalog");
    StartInputs in;
    in.v_y = f[catalog.index("v_y")];
    in.d_y_cl = f[catalog.index("d_y_cl")];
    in.v_x = f[catalog.index("v_x")];
    in.a_x = f[catalog.index("a_x")];
    in.leader = f[catalog.index("actv_f")] != 0.0;
    in.d_rel_f_v = f[catalog.index("d_rel_f_v")];
    in.v_rel_f_v = f[catalog.index("v_rel_f_v")];
    return in;
}

std::vector<std::string> lateral_input_dims() { return {"v_y", "d_y_cl"}; }
std::vector<std::string> lateral_dims() { return {"v_y", "d_y_cl", "t", "y"}; }
std::vector<std::string> lateral_integrated_dims() { return {"v_y", "d_y_cl", "p_lcl", "p_lcr", "t", "y"}; }

std::vector<std::string> longitudinal_input_dims(bool leader) {
    if (leader) return {"v_x", "a_x", "d_rel_f_v", "v_rel_f_v"};
    return {"v_x", "a_x"};
}

std::vector<std::string> longitudinal_dims(bool leader) {
    auto d = longitudinal_input_dims(leader);
    d.push_back("t");
    d.push_back("dx");
    return d;
}

std::vector<std::string> longitudinal_integrated_dims(bool leader) {
    auto d = longitudinal_input_dims(leader);
    d.insert(d.end(), {"p_lcl", "p_lcr", "t", "dx"});
    return d;
}

std::vector<double> longitudinal_inputs(const StartInputs& in, bool leader_model, double t) {
    if (leader_model) {
        if (!in.leader || in.d_rel_f_v == sim::kAbsentDistance)
            throw DomainError("leader sentinel values must not reach the model with leader features");
        return {in.v_x, in.a_x, in.d_rel_f_v, in.v_rel_f_v, t};
    }
    return {in.v_x, in.a_x, t};
}

// ---------------------------------------------------------------- confidence

ConfidenceModel make_confidence_model(GmmModel density) {
    if (density.size() == 0) throw DomainError("confidence density has no components");
    ConfidenceModel m;
    const auto strongest = static_cast<std::size_t>(
        std::max_element(density.weights.begin(), density.weights.end()) - density.weights.begin());
    m.log_anchor = learn::gmm_logpdf(density, density.means[strongest]);
    m.density = std::move(density);
    return m;
}

double confidence(const ConfidenceModel& model, const std::vector<double>& input) {
    const Eigen::Map<const Eigen::VectorXd> x(input.data(), static_cast<Eigen::Index>(input.size()));
    const double lp = learn::gmm_logpdf(model.density, x);
    return std::min(1.0, std::exp(lp - model.log_anchor));
}

// ---------------------------------------------------------------- serialization

namespace {

nlohmann::json pair_json(const LongitudinalPair& p) {
    return {{"no_leader", learn::gmm_to_json(p.models[0])}, {"leader", learn::gmm_to_json(p.models[1])}};
}

LongitudinalPair pair_from(const nlohmann::json& j) {
    LongitudinalPair p;
    p.models[0] = learn::gmm_from_json(j.at("no_leader"));
    p.models[1] = learn::gmm_from_json(j.at("leader"));
    return p;
}

nlohmann::json conf_json(const ConfidenceModel& c) {
    return {{"density", learn::gmm_to_json(c.density)}, {"log_anchor", c.log_anchor}};
}

ConfidenceModel conf_from(const nlohmann::json& j) {
    ConfidenceModel c;
    c.density = learn::gmm_from_json(j.at("density"));
    c.log_anchor = j.at("log_anchor").get<double>();
    return c;
}

}  // namespace

nlohmann::json bundle_to_json(const PredictorBundle& b) {
    nlohmann::json j;
    for (std::size_t m = 0; m < 3; ++m) {
        const std::string name(to_string(kManeuvers[m]));
        j["lateral_experts"][name] = learn::gmm_to_json(b.lateral_experts[m]);
        j["longitudinal_experts"][name] = pair_json(b.longitudinal_experts[m]);
    }
    j["lateral_pooled"] = learn::gmm_to_json(b.lateral_pooled);
    j["longitudinal_pooled"] = pair_json(b.longitudinal_pooled);
    j["lateral_integrated"] = nlohmann::json::object();
    for (const auto& [k, v] : b.lateral_integrated) j["lateral_integrated"][k] = learn::gmm_to_json(v);
    j["longitudinal_integrated"] = nlohmann::json::object();
    for (const auto& [k, v] : b.longitudinal_integrated) j["longitudinal_integrated"][k] = pair_json(v);
    j["confidence_y"] = conf_json(b.confidence_y);
    j["confidence_x"] = {{"no_leader", conf_json(b.confidence_x[0])}, {"leader", conf_json(b.confidence_x[1])}};
    j["priors"] = b.priors;
    return j;
}

PredictorBundle bundle_from_json(const nlohmann::json& j) {
    PredictorBundle b;
    try {
        for (std::size_t m = 0; m < 3; ++m) {
            const std::string name(to_string(kManeuvers[m]));
            b.lateral_experts[m] = learn::gmm_from_json(j.at("lateral_experts").at(name));
            b.longitudinal_experts[m] = pair_from(j.at("longitudinal_experts").at(name));
        }
        b.lateral_pooled = learn::gmm_from_json(j.at("lateral_pooled"));
        b.longitudinal_pooled = pair_from(j.at("longitudinal_pooled"));
        for (const auto& [k, v] : j.at("lateral_integrated").items()) b.lateral_integrated[k] = learn::gmm_from_json(v);
        for (const auto& [k, v] : j.at("longitudinal_integrated").items()) b.longitudinal_integrated[k] = pair_from(v);
        b.confidence_y = conf_from(j.at("confidence_y"));
        b.confidence_x[0] = conf_from(j.at("confidence_x").at("no_leader"));
        b.confidence_x[1] = conf_from(j.at("confidence_x").at("leader"));
        const auto pri = j.at("priors").get<std::vector<double>>();
        if (pri.size() != 3) throw DomainError("priors must have three entries");
        b.priors = {pri[0], pri[1], pri[2]};
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("predictor bundle: ") + e.what());
    }
    return b;
}

// ---------------------------------------------------------------- predictor

Predictor::Predictor(PredictorBundle bundle) : bundle_(std::move(bundle)) {
    const auto lat_in = std::vector<std::string>{"v_y", "d_y_cl", "t"};
    const auto lat_int_in = std::vector<std::string>{"v_y", "d_y_cl", "p_lcl", "p_lcr", "t"};
    auto long_in = [](bool leader, bool integrated) {
        auto d = longitudinal_input_dims(leader);
        if (integrated) d.insert(d.end(), {"p_lcl", "p_lcr"});
        d.push_back("t");
        return d;
    };
    auto make_long = [&](const LongitudinalPair& p, bool integrated) {
        LongConditioners lc;
        for (int l = 0; l < 2; ++l)
            if (p.models[static_cast<std::size_t>(l)].size() > 0)
                lc.c[static_cast<std::size_t>(l)] = Conditioner(p.models[static_cast<std::size_t>(l)], long_in(l == 1, integrated));
        return lc;
    };
    for (std::size_t m = 0; m < 3; ++m) {
        if (bundle_.lateral_experts[m].size() > 0) lat_[m] = Conditioner(bundle_.lateral_experts[m], lat_in);
        long_[m] = make_long(bundle_.longitudinal_experts[m], false);
    }
    if (bundle_.lateral_pooled.size() > 0) lat_pooled_ = Conditioner(bundle_.lateral_pooled, lat_in);
    long_pooled_ = make_long(bundle_.longitudinal_pooled, false);
    for (const auto& [k, v] : bundle_.lateral_integrated) lat_int_[k] = Conditioner(v, lat_int_in);
    for (const auto& [k, v] : bundle_.longitudinal_integrated) long_int_[k] = make_long(v, true);
}

namespace {

void require(const Conditioner& c, const std::string& what) {
    if (c.empty()) throw DomainError("predictor bundle lacks the " + what);
}

// Concatenates the experts' conditionals with their weights scaled by the gate.
PositionDistribution blend(const std::array<const Conditioner*, 3>& experts, const Probs& w,
                           const std::vector<double>& given) {
    PositionDistribution out;
    for (std::size_t m = 0; m < 3; ++m) {
        if (w[m] <= 0.0) continue;
        require(*experts[m], std::string(to_string(kManeuvers[m])) + " expert");
        const auto part = to_position(experts[m]->condition(given));
        for (std::size_t k = 0; k < part.weights.size(); ++k) {
            out.weights.push_back(w[m] * part.weights[k]);
            out.means.push_back(part.means[k]);
            out.variances.push_back(part.variances[k]);
        }
    }
    return out;
}

}  // namespace

PositionDistribution Predictor::lateral(Strategy s, const StartInputs& in, const GateInput& gate, double t,
                                        const std::string& classifier) const {
    if (s == Strategy::NOCLF) {
        require(lat_pooled_, "pooled lateral model");
        return to_position(lat_pooled_.condition(std::vector<double>{in.v_y, in.d_y_cl, t}));
    }
    if (s == Strategy::IGMM) {
        const auto it = lat_int_.find(classifier);
        if (it == lat_int_.end()) throw DomainError("no integrated lateral model for classifier '" + classifier + "'");
        return to_position(it->second.condition(std::vector<double>{in.v_y, in.d_y_cl, gate.probs[0], gate.probs[2], t}));
    }
    const auto w = gate_weights(s, gate.probs, gate.label, bundle_.priors);
    return blend({&lat_[0], &lat_[1], &lat_[2]}, w, {in.v_y, in.d_y_cl, t});
}

PositionDistribution Predictor::longitudinal(Strategy s, const StartInputs& in, const GateInput& gate, double t,
                                             const std::string& classifier) const {
    const bool leader = in.leader;
    const auto l = static_cast<std::size_t>(leader ? 1 : 0);
    std::vector<double> given = longitudinal_inputs(in, leader, t);
    PositionDistribution out;
    if (s == Strategy::NOCLF) {
        require(long_pooled_.c[l], "pooled longitudinal model");
        out = to_position(long_pooled_.c[l].condition(given));
    } else if (s == Strategy::IGMM) {
        const auto it = long_int_.find(classifier);
        if (it == long_int_.end())
            throw DomainError("no integrated longitudinal model for classifier '" + classifier + "'");
        require(it->second.c[l], "integrated longitudinal model");
        given.insert(given.end() - 1, {gate.probs[0], gate.probs[2]});
        out = to_position(it->second.c[l].condition(given));
    } else {
        const auto w = gate_weights(s, gate.probs, gate.label, bundle_.priors);
        out = blend({&long_[0].c[l], &long_[1].c[l], &long_[2].c[l]}, w, given);
    }
    out.shift(cv_prediction(0.0, in.v_x, t));
    return out;
}

std::array<PositionDistribution, 3> Predictor::lateral_parts(const StartInputs& in, double t) const {
    std::array<PositionDistribution, 3> out;
    const std::vector<double> given{in.v_y, in.d_y_cl, t};
    for (std::size_t m = 0; m < 3; ++m) {
        require(lat_[m], std::string(to_string(kManeuvers[m])) + " expert");
        out[m] = to_position(lat_[m].condition(given));
    }
    return out;
}

std::array<PositionDistribution, 3> Predictor::longitudinal_parts(const StartInputs& in, double t) const {
    std::array<PositionDistribution, 3> out;
    const auto l = static_cast<std::size_t>(in.leader ? 1 : 0);
    const auto given = longitudinal_inputs(in, in.leader, t);
    for (std::size_t m = 0; m < 3; ++m) {
        require(long_[m].c[l], std::string(to_string(kManeuvers[m])) + " longitudinal expert");
        out[m] = to_position(long_[m].c[l].condition(given));
        out[m].shift(cv_prediction(0.0, in.v_x, t));
    }
    return out;
}

PositionDistribution Predictor::mix(const std::array<PositionDistribution, 3>& parts, const Probs& w) {
    PositionDistribution out;
    for (std::size_t m = 0; m < 3; ++m) {
        if (w[m] <= 0.0) continue;
        const auto& part = parts[m];
        for (std::size_t k = 0; k < part.weights.size(); ++k) {
            out.weights.push_back(w[m] * part.weights[k]);
            out.means.push_back(part.means[k]);
            out.variances.push_back(part.variances[k]);
        }
    }
    return out;
}

double Predictor::confidence_y(const StartInputs& in) const {
    return confidence(bundle_.confidence_y, {in.v_y, in.d_y_cl});
}

double Predictor::confidence_x(const StartInputs& in) const {
    if (in.leader) return confidence(bundle_.confidence_x[1], {in.v_x, in.a_x, in.d_rel_f_v, in.v_rel_f_v});
    return confidence(bundle_.confidence_x[0], {in.v_x, in.a_x});
}

}  // namespace bpred::predict
