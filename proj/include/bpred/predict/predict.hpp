#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "bpred/core/types.hpp"
#include "bpred/learn/gmm.hpp"

namespace bpred::predict {

using learn::GmmModel;

/// Mixture over the output dimensions left after conditioning.
struct ConditionalMixture {
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
};

/// Per-component regression terms for conditioning a model on a fixed list of
/// input dimensions. Built once, applied to many input points.
class Conditioner {
public:
    Conditioner() = default;
    Conditioner(const GmmModel& model, const std::vector<std::string>& inputs);

    const std::vector<std::string>& inputs() const noexcept { return inputs_; }
    const std::vector<std::string>& outputs() const noexcept { return outputs_; }
    /// `given` lists the input values in the order of inputs().
    ConditionalMixture condition(const double* given) const;
    ConditionalMixture condition(const std::vector<double>& given) const;
    bool empty() const noexcept { return comps_.empty(); }

private:
    struct Component {
        double log_weight;
        Eigen::VectorXd mean_in, mean_out;
        Eigen::MatrixXd gain;           // Sigma_oi Sigma_ii^-1
        Eigen::MatrixXd cov_out;        // Sigma_oo - gain Sigma_io
        Eigen::MatrixXd chol_in;        // lower Cholesky factor of Sigma_ii
        double log_norm_in;             // -0.5 (d ln 2pi + ln det Sigma_ii)
    };
    std::vector<std::string> inputs_, outputs_;
    std::vector<Component> comps_;
};

/// Conditions `model` on the named input values.
ConditionalMixture gmr_condition(const GmmModel& model, const std::map<std::string, double>& given);

/// One-dimensional predictive mixture.
struct PositionDistribution {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> variances;

    double mean() const;      // center of gravity
    double variance() const;  // law of total variance
    double logpdf(double v) const;
    void shift(double by);
    void validate() const;
};

/// Requires a single output dimension.
PositionDistribution to_position(const ConditionalMixture& m);

enum class Strategy { Raw, WTA, PWRaw, IGMM, Labels, Priors, NOCLF };
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);
inline constexpr std::array<Strategy, 7> kStrategies{Strategy::Labels, Strategy::Priors, Strategy::NOCLF, Strategy::Raw,
                                                     Strategy::WTA,    Strategy::PWRaw,  Strategy::IGMM};

using Probs = std::array<double, 3>;  // LCL, FLW, LCR
inline constexpr Probs kDefaultPriors{0.03, 0.94, 0.03};

/// Gate weights of the mixture-of-experts strategies. IGMM and NOCLF bypass
/// gating and are rejected. Throws DomainError for a non-simplex input.
Probs gate_weights(Strategy s, const Probs& probs, Maneuver label, const Probs& priors = kDefaultPriors);

double cv_prediction(double x0, double v_x, double t);

/// Inputs of one prediction start, read from a feature frame.
struct StartInputs {
    double v_y = 0.0;
    double d_y_cl = 0.0;
    double v_x = 0.0;
    double a_x = 0.0;
    bool leader = false;
    double d_rel_f_v = 0.0;
    double v_rel_f_v = 0.0;
};
/// Reads the named features; `leader` comes from actv_f.
StartInputs start_inputs(const Catalog& catalog, const std::vector<double>& features);

// Dimension lists of the models.
std::vector<std::string> lateral_dims();             // v_y, d_y_cl, t, y
std::vector<std::string> lateral_integrated_dims();  // v_y, d_y_cl, p_lcl, p_lcr, t, y
std::vector<std::string> longitudinal_dims(bool leader);  // v_x, a_x, [d_rel_f_v, v_rel_f_v,] t, dx
std::vector<std::string> longitudinal_integrated_dims(bool leader);
std::vector<std::string> lateral_input_dims();        // v_y, d_y_cl
std::vector<std::string> longitudinal_input_dims(bool leader);

/// Density of the training inputs, normalized so its strongest component mean scores 1.
struct ConfidenceModel {
    GmmModel density;
    double log_anchor = 0.0;  // log density at the mean of the largest-weight component
};
ConfidenceModel make_confidence_model(GmmModel density);
/// Value in (0, 1]; densities above the anchor are clipped to 1.
double confidence(const ConfidenceModel& model, const std::vector<double>& input);

/// Longitudinal models are indexed [leader ? 1 : 0].
struct LongitudinalPair {
    std::array<GmmModel, 2> models;
};

/// All fitted position models.
struct PredictorBundle {
    std::array<GmmModel, 3> lateral_experts;
    GmmModel lateral_pooled;
    std::array<LongitudinalPair, 3> longitudinal_experts;
    LongitudinalPair longitudinal_pooled;
    // integrated models keyed by classifier name
    std::map<std::string, GmmModel> lateral_integrated;
    std::map<std::string, LongitudinalPair> longitudinal_integrated;
    ConfidenceModel confidence_y;
    std::array<ConfidenceModel, 2> confidence_x;
    Probs priors = kDefaultPriors;
};

nlohmann::json bundle_to_json(const PredictorBundle& b);
PredictorBundle bundle_from_json(const nlohmann::json& j);

/// Classifier output attached to a start; `label` only feeds the Labels strategy.
struct GateInput {
    Probs probs{1.0 / 3, 1.0 / 3, 1.0 / 3};
    Maneuver label = Maneuver::FLW;
};

/// Bundle with every conditioner prepared. Prediction is read-only and thread safe.
class Predictor {
public:
    explicit Predictor(PredictorBundle bundle);

    const PredictorBundle& bundle() const noexcept { return bundle_; }

    /// Lateral distribution of y at time t. `classifier` names the integrated
    /// model for the IGMM strategy.
    PositionDistribution lateral(Strategy s, const StartInputs& in, const GateInput& gate, double t,
                                 const std::string& classifier = "") const;
    /// Longitudinal distribution of x at time t (x0 = 0 in the start frame).
    PositionDistribution longitudinal(Strategy s, const StartInputs& in, const GateInput& gate, double t,
                                      const std::string& classifier = "") const;

    /// Per-maneuver expert conditionals, for callers that try several gates
    /// on the same start. Longitudinal parts are already shifted by v_x t.
    std::array<PositionDistribution, 3> lateral_parts(const StartInputs& in, double t) const;
    std::array<PositionDistribution, 3> longitudinal_parts(const StartInputs& in, double t) const;
    /// Weighted union of expert parts; zero weights drop the part.
    static PositionDistribution mix(const std::array<PositionDistribution, 3>& parts, const Probs& w);

    double confidence_y(const StartInputs& in) const;
    double confidence_x(const StartInputs& in) const;

private:
    struct LongConditioners {
        std::array<Conditioner, 2> c;
    };
    PredictorBundle bundle_;
    std::array<Conditioner, 3> lat_;
    Conditioner lat_pooled_;
    std::array<LongConditioners, 3> long_;
    LongConditioners long_pooled_;
    std::map<std::string, Conditioner> lat_int_;
    std::map<std::string, LongConditioners> long_int_;
};

/// Inputs for the longitudinal models; throws DomainError when the leader
/// sentinel would reach a model that uses leader features.
std::vector<double> longitudinal_inputs(const StartInputs& in, bool leader_model, double t);

}  // namespace bpred::predict
