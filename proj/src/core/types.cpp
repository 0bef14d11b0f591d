#include "bpred/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace bpred {

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& what)
    : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string_view to_string(Maneuver m) noexcept {
    switch (m) {
        case Maneuver::LCL: return "LCL";
        case Maneuver::FLW: return "FLW";
        case Maneuver::LCR: return "LCR";
    }
    return "FLW";
}

Maneuver parse_maneuver(std::string_view s) {
    if (s == "LCL") return Maneuver::LCL;
    if (s == "FLW") return Maneuver::FLW;
    if (s == "LCR") return Maneuver::LCR;
    throw DomainError("unknown maneuver '" + std::string(s) + "'");
}

Catalog::Catalog(std::vector<FeatureDescriptor> features) {
    for (auto& f : features) add(std::move(f));
}

void Catalog::add(FeatureDescriptor f) {
    if (f.id.empty()) throw DomainError("feature id must not be empty");
    if (lookup_.count(f.id)) throw DomainError("duplicate feature id '" + f.id + "'");
    if (f.kind == FeatureKind::Nominal && f.nominal_values.empty())
        throw DomainError("nominal feature '" + f.id + "' needs a value enumeration");
    lookup_.emplace(f.id, features_.size());
    features_.push_back(std::move(f));
}

std::optional<std::size_t> Catalog::find(std::string_view id) const {
    auto it = lookup_.find(std::string(id));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

std::size_t Catalog::index(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw DomainError("unknown feature id '" + std::string(id) + "'");
}

std::vector<std::size_t> Catalog::indices(const std::vector<std::string>& ids) const {
    std::vector<std::size_t> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(index(id));
    return out;
}

std::vector<std::string> Catalog::ids() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (const auto& f : features_) out.push_back(f.id);
    return out;
}

std::size_t frame_index(double t) noexcept {
    if (t <= 0.0) return 0;
    return static_cast<std::size_t>(std::llround(t / kSamplePeriod));
}

double Situation::t_end() const noexcept {
    return samples.empty() ? 0.0 : samples.back().t_rec;
}

std::optional<RoadPosition> Situation::relative_position(std::size_t i, double dt) const {
    if (i >= track.size()) return std::nullopt;
    const double f = static_cast<double>(i) + dt / kSamplePeriod;
    const double last = static_cast<double>(track.size() - 1);
    constexpr double eps = 1e-9;
    if (f < -eps || f > last + eps) return std::nullopt;
    double fc = std::clamp(f, 0.0, last);
    if (std::abs(fc - std::round(fc)) < eps) fc = std::round(fc);  // grid times land exactly on frames
    auto lo = static_cast<std::size_t>(std::floor(fc));
    if (lo >= track.size() - 1) lo = track.size() - 1;
    const double w = fc - static_cast<double>(lo);
    const RoadPosition& a = track[lo];
    const RoadPosition& b = track[std::min(lo + 1, track.size() - 1)];
    const RoadPosition& o = track[i];
    // w == 0 must reproduce the frame exactly
    const double x = w == 0.0 ? a.x : a.x + w * (b.x - a.x);
    const double y = w == 0.0 ? a.y : a.y + w * (b.y - a.y);
    return RoadPosition{x - o.x, y - o.y};
}

std::vector<FuturePoint> Situation::future(std::size_t i, double t_from, double t_to) const {
    std::vector<FuturePoint> out;
    const auto k0 = static_cast<long>(std::llround(t_from / kSamplePeriod));
    const auto k1 = static_cast<long>(std::llround(t_to / kSamplePeriod));
    for (long k = k0; k <= k1; ++k) {
        const long j = static_cast<long>(i) + k;
        if (j < 0 || j >= static_cast<long>(track.size())) continue;
        const auto& p = track[static_cast<std::size_t>(j)];
        out.push_back({static_cast<double>(k) / 10.0, p.x - track[i].x, p.y - track[i].y});
    }
    return out;
}

std::size_t Dataset::sample_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : situations) n += s.samples.size();
    return n;
}

}  // namespace bpred
