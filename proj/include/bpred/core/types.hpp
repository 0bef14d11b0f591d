#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bpred {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed file content. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSamplePeriod = 0.1;  // 10 Hz throughout

enum class Maneuver : std::uint8_t { LCL = 0, FLW = 1, LCR = 2 };

inline constexpr std::array<Maneuver, 3> kManeuvers{Maneuver::LCL, Maneuver::FLW, Maneuver::LCR};

constexpr std::size_t index_of(Maneuver m) noexcept { return static_cast<std::size_t>(m); }
std::string_view to_string(Maneuver m) noexcept;
Maneuver parse_maneuver(std::string_view s);

enum class FeatureKind : std::uint8_t { Continuous, Nominal };

struct FeatureDescriptor {
    std::string id;
    FeatureKind kind = FeatureKind::Continuous;
    std::string unit;
    std::vector<int> nominal_values;  // allowed integer codes, nominal kind only
    std::string description;

    bool operator==(const FeatureDescriptor&) const = default;
};

/// Ordered list of feature descriptors with unique ids.
class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<FeatureDescriptor> features);

    void add(FeatureDescriptor f);
    std::size_t size() const noexcept { return features_.size(); }
    bool empty() const noexcept { return features_.empty(); }
    const FeatureDescriptor& operator[](std::size_t i) const { return features_[i]; }
    const std::vector<FeatureDescriptor>& features() const noexcept { return features_; }

    std::optional<std::size_t> find(std::string_view id) const;
    /// Throws DomainError for unknown ids.
    std::size_t index(std::string_view id) const;
    std::vector<std::size_t> indices(const std::vector<std::string>& ids) const;
    std::vector<std::string> ids() const;

    bool operator==(const Catalog& o) const { return features_ == o.features_; }

private:
    std::vector<FeatureDescriptor> features_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

/// One 10 Hz frame of the observed vehicle. Features are stored densely in
/// catalog order.
struct Sample {
    std::int64_t situation_id = 0;
    double t_rec = 0.0;
    std::vector<double> features;
    double ttlcl = kInf;
    double ttlcr = kInf;
    Maneuver label = Maneuver::FLW;

    bool operator==(const Sample&) const = default;
};

/// Position in the road-aligned (curvilinear) frame: x along the lane, y to the left.
struct RoadPosition {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const RoadPosition&) const = default;
};

/// Lateral positions of the markings bounding the lane assigned at a sample.
struct Markings {
    double left = 0.0;
    double right = 0.0;
    bool operator==(const Markings&) const = default;
};

struct FuturePoint {
    double t;
    double x;
    double y;
};

struct Situation {
    std::int64_t situation_id = 0;
    double lane_width = 3.5;
    std::vector<Sample> samples;
    std::vector<RoadPosition> track;   // one per sample
    std::vector<Markings> markings;    // one per sample

    double t_end() const noexcept;

    /// Position at `dt` seconds after sample `i`, relative to the sample's own
    /// position. Linear interpolation between frames; nullopt outside the
    /// recorded span.
    std::optional<RoadPosition> relative_position(std::size_t i, double dt) const;

    /// Relative future on the regular 10 Hz grid from `t_from` to `t_to`
    /// (inclusive), truncated to the recorded span.
    std::vector<FuturePoint> future(std::size_t i, double t_from, double t_to) const;

    bool operator==(const Situation&) const = default;
};

struct Dataset {
    Catalog catalog;
    std::vector<Situation> situations;

    std::size_t sample_count() const noexcept;
    bool operator==(const Dataset&) const = default;
};

/// Index of the grid frame nearest to `t` (seconds since situation start).
std::size_t frame_index(double t) noexcept;

/// Frame time of index `i`, computed as i / 10 so that it is correctly rounded.
constexpr double frame_time(std::size_t i) noexcept { return static_cast<double>(i) / 10.0; }

}  // namespace bpred
