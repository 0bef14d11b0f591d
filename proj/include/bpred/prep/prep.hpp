#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include "bpred/core/types.hpp"

namespace bpred::prep {

/// Labeling horizon and the prediction-time grids for training and test.
struct HorizonConfig {
    double horizon = 5.0;      // T_h
    double train_lead = 1.0;   // training times start at -train_lead
    double train_tail = 1.0;   // and end at horizon + train_tail
    double grid_jitter = 0.05; // uniform jitter of interior training grid times, s

    /// Nominal training grid {-1.0, -0.9, ..., 6.0}.
    std::vector<double> train_times() const;
    /// Test grid {0.0, 0.1, ..., 5.0}.
    std::vector<double> test_times() const;
    /// Standard deviation of the tail subsampling: the -3 sigma percentile sits at -train_lead.
    double tail_sigma() const { return train_lead / 3.0; }
};

/// Per-sample (ttlcl, ttlcr) by scanning the recorded track for the first
/// instant the vehicle center is beyond the sample's left / right marking.
std::vector<std::pair<double, double>> compute_ttlc(const Situation& situation);

/// Literal labeling rule; ties between the two times fall through to FLW.
Maneuver assign_label(double ttlcl, double ttlcr, double horizon);

/// Fills ttlcl/ttlcr/label of every sample.
void label_situation(Situation& situation, double horizon);
void label_dataset(Dataset& dataset, double horizon);

/// A sample is usable for classification when recorded continuously up to the horizon.
bool covers_horizon(const Situation& situation, std::size_t sample, double horizon);

struct SampleRef {
    std::uint32_t situation = 0;  // index into Dataset::situations
    std::uint32_t sample = 0;
    bool operator==(const SampleRef&) const = default;
    auto operator<=>(const SampleRef&) const = default;
};

/// First split of the data into a maneuver part and a position part.
struct Partition {
    std::vector<std::int64_t> maneuver;       // D^Ma situation ids
    std::vector<std::int64_t> position_train; // D^Po_T
    std::vector<std::int64_t> position_test;  // D^Po_Te
};

/// Stratified by situation type (contains a left change, a right change, or neither).
Partition partition_dataset(const Dataset& dataset, double maneuver_fraction, double position_test_fraction,
                            std::uint64_t seed);

struct FoldAssignment {
    std::map<std::int64_t, int> fold_of;       // situation id -> fold in 1..k
    std::vector<std::vector<SampleRef>> folds; // balanced sample lists, folds[f-1]
    std::vector<std::array<std::size_t, 3>> raw_counts; // per fold class counts before balancing
};

/// Assigns every listed situation (all situations when `situation_ids` is
/// empty) to one of k folds, then undersamples each fold to equal class counts.
FoldAssignment split_folds(const Dataset& dataset, const std::vector<std::int64_t>& situation_ids, int k,
                           double horizon, std::uint64_t seed);

/// Random undersampling of `refs` so that all classes reach the smallest class count.
/// Preserves the relative order of the kept samples.
std::vector<SampleRef> balance_classes(const Dataset& dataset, const std::vector<SampleRef>& refs,
                                       std::uint64_t seed);

/// Prediction start point: the feature frame the predictors condition on.
struct TrajectoryStart {
    std::int64_t situation_id = 0;
    double t_rec = 0.0;
    Maneuver label = Maneuver::FLW;
    std::vector<double> features;  // catalog order
    double p_lcl = 0.0;
    double p_lcr = 0.0;
};

struct ExplodedRow {
    std::uint32_t start = 0;  // index into ExplodedSet::starts
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double p_lcl = 0.0;
    double p_lcr = 0.0;
};

struct ExplodedSet {
    std::vector<TrajectoryStart> starts;
    std::vector<ExplodedRow> rows;
    std::size_t skipped = 0;  // candidate starts lacking future coverage
};

/// Situations selected by id, in dataset order.
std::vector<const Situation*> select_situations(const Dataset& dataset, const std::vector<std::int64_t>& ids);

/// Training explosion: 71 rows per start, times drawn as
/// 10 from the lower Gaussian tail in [-1, 0], the 51-point grid on [0, 5]
/// with jittered interior points, and 10 from the upper tail in [5, 6].
/// Starts are taken every `start_stride` frames.
ExplodedSet explode_training(const std::vector<const Situation*>& situations, const HorizonConfig& cfg,
                             std::uint64_t seed, std::size_t start_stride = 1);

/// Test explosion: 51 rows per start on the fixed grid.
ExplodedSet explode_test(const std::vector<const Situation*>& situations, const HorizonConfig& cfg,
                         std::size_t start_stride = 1);

/// Copies each start's probabilities onto its rows.
void broadcast_probabilities(ExplodedSet& set);

/// Reflects a probability for the mirrored duplicate: p < 0.5 -> -p, otherwise 2 - p.
double mirror_probability(double p);

/// Appends a mirrored duplicate of every row (both P values reflected).
std::vector<ExplodedRow> mirror_probabilities(const std::vector<ExplodedRow>& rows);

/// Start indices per class, with FLW undersampled to the mean of the LCL and
/// LCR counts for expert training.
std::array<std::vector<std::uint32_t>, 3> expert_starts(const ExplodedSet& set, std::uint64_t seed);

/// Persists an exploded set as starts.csv (features) and rows.csv (t, x, y, P_LCL, P_LCR).
void save_exploded(const ExplodedSet& set, const Catalog& catalog, const std::filesystem::path& dir);

}  // namespace bpred::prep
