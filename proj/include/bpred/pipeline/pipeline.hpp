#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bpred/learn/classifier.hpp"
#include "bpred/pipeline/config.hpp"
#include "bpred/predict/predict.hpp"
#include "bpred/prep/prep.hpp"
#include "bpred/sim/simulator.hpp"

namespace bpred::pipeline {

/// Artifact locations below the work directory.
struct Paths {
    std::filesystem::path work;

    std::filesystem::path sim() const { return work / "sim"; }
    std::filesystem::path labeled() const { return work / "labeled"; }
    std::filesystem::path split() const { return work / "split.json"; }
    std::filesystem::path features() const { return work / "features"; }
    std::filesystem::path models() const { return work / "models"; }
    std::filesystem::path metrics() const { return work / "metrics"; }
    std::filesystem::path report() const { return work / "report"; }
    std::filesystem::path exploded() const { return work / "exploded"; }
};

struct SplitSettings {
    double maneuver_fraction = 0.5;
    double position_test_fraction = 0.5;
    int folds = 6;
    std::uint64_t seed = 0;
};

struct SelectSettings {
    double theta = 0.15;
    std::uint64_t seed = 0;
    std::vector<learn::Algo> wrapper_algos{learn::Algo::GNB, learn::Algo::MLP};
    char wrapper_start = 'B';
    std::size_t wrapper_max_rows = 3000;
    int wrapper_train_fold = 1;
    int wrapper_val_fold = 2;
};

struct ClassifierSettings {
    std::vector<learn::Algo> algos{learn::Algo::GNB, learn::Algo::RF, learn::Algo::MLP};
    std::map<learn::Algo, std::vector<char>> variants;
    std::map<learn::Algo, std::vector<learn::Hyper>> grid;
    std::uint64_t seed = 0;
    double fpr_max = 0.01;
    std::size_t cv_rotations = 0;  // 0 rotates through every training fold
};

struct PredictorSettings {
    std::vector<std::string> classifiers{"RF", "MLP"};
    learn::GmmFitConfig gmm;
    std::size_t max_fit_rows = 8000;
    std::size_t confidence_rows = 8000;
    std::size_t train_stride = 5;
    std::size_t test_stride = 10;
    bool write_exploded = false;
    predict::Probs priors = predict::kDefaultPriors;
    std::uint64_t seed = 0;
};

struct EvalSettings {
    std::size_t per_class_limit = 20000;
    double tau_bin = 0.5;
    std::string confidence_classifier = "MLP";
    predict::Strategy confidence_strategy = predict::Strategy::PWRaw;
};

struct PredictVerbSettings {
    std::filesystem::path input;
    std::filesystem::path output;
    std::string classifier = "MLP";
    predict::Strategy strategy = predict::Strategy::PWRaw;
};

/// Every pipeline parameter resolved from a Config. Seeds have no defaults.
struct Settings {
    Paths paths;
    sim::SimConfig sim;
    prep::HorizonConfig horizon;
    SplitSettings split;
    SelectSettings select;
    ClassifierSettings clf;
    PredictorSettings pred;
    EvalSettings eval;
    PredictVerbSettings predict;
};

/// Throws ConfigError naming the first missing or malformed key.
Settings load_settings(const Config& config);

/// Verbs in the order `all` runs them (predict is not part of `all`).
const std::vector<std::string>& verb_names();
std::string verb_help(const std::string& verb);

/// Runs one verb and prints its summary line(s) to `out`. Throws on failure.
void run_verb(const std::string& verb, const Settings& settings, std::ostream& out);

/// Exit-code wrapper: 0 on success, 1 on validation errors (bad config,
/// missing inputs, malformed files), 2 on runtime errors, 64 for an unknown verb.
int run(const std::string& verb, const Config& config, std::ostream& out, std::ostream& err);

}  // namespace bpred::pipeline
