#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpred/core/types.hpp"

namespace bpred::sim {

struct SimConfig {
    std::size_t n_situations = 100;
    double duration_s = 16.0;
    double horizon_s = 5.0;
    double lane_width = 3.5;
    int n_lanes = 3;
    double lane_change_rate = 0.5;
    // Lane change durations. Overtaking to the left is brisk, returning to
    // the right is a slower drift.
    double lcl_duration_min = 3.0;
    double lcl_duration_max = 4.5;
    double lcr_duration_min = 4.5;
    double lcr_duration_max = 6.0;
    double speed_min = 22.0;  // m/s
    double speed_max = 36.0;
    double neighbor_rate = 0.35;  // chance that an adjacent-lane slot is occupied
    std::uint64_t rng_seed = 1;

    // Lane keeping: lightly damped second-order wander of the lateral offset.
    double lk_sigma = 0.1;     // stationary std of the offset, m
    double lk_period = 8.0;    // natural period, s
    double lk_decay = 20.0;    // amplitude decay time, s
    // Anticipation cue before a lane change.
    double cue_offset = 0.3;   // m toward the target lane
    double cue_time = 2.0;     // s before profile onset

    // Test hooks: force the maneuver and timing of every situation.
    std::optional<Maneuver> forced_maneuver;
    std::optional<double> forced_lc_duration;
    std::optional<double> forced_crossing_time;

    /// Throws DomainError describing the first violated constraint.
    void validate() const;
};

/// Minimum-jerk lateral transition 10s^3 - 15s^4 + 6s^5 on s in [0, 1].
double lane_change_profile(double s);
double lane_change_profile_d1(double s);
double lane_change_profile_d2(double s);

/// Feature catalog emitted by the simulator.
Catalog feature_catalog();

/// Features emitted as independent noise (varying, uninformative chaff).
std::vector<std::string> noise_feature_ids();
/// Pairs describing the same physical quantity in the vehicle and the
/// curvilinear frame, each with its own measurement noise.
std::vector<std::pair<std::string, std::string>> duplicate_feature_pairs();
/// Features emitted as constant defaults.
std::vector<std::string> constant_feature_ids();

/// Sentinel longitudinal distance for an absent front relation partner.
inline constexpr double kAbsentDistance = 200.0;

/// Pure function of (config, index). Samples carry ttlcl = ttlcr = inf and
/// label FLW until labeled by prep.
Situation generate_situation(const SimConfig& config, std::size_t situation_index);

/// Planned maneuver of a generated situation, for tests and diagnostics.
Maneuver planned_maneuver(const SimConfig& config, std::size_t situation_index);

Dataset generate_dataset(const SimConfig& config);

}  // namespace bpred::sim
