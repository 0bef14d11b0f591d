#include <doctest.h>

#include <set>

#include "bpred/prep/prep.hpp"
#include "bpred/sim/simulator.hpp"
#include "helpers.hpp"

using namespace bpred;

namespace {

sim::SimConfig forced_left(double duration, std::optional<double> crossing = std::nullopt) {
    sim::SimConfig cfg;
    cfg.n_situations = 1;
    cfg.forced_maneuver = Maneuver::LCL;
    cfg.forced_lc_duration = duration;
    cfg.forced_crossing_time = crossing;
    return cfg;
}

// Sign changes of (left marking of the start lane - y) along the track.
std::vector<std::size_t> left_crossings(const Situation& s) {
    const double marking = s.markings.front().left;
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k < s.track.size(); ++k)
        if ((marking - s.track[k - 1].y > 0.0) != (marking - s.track[k].y > 0.0)) out.push_back(k);
    return out;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("profile boundaries and shape") {
    CHECK(sim::lane_change_profile(0.0) == 0.0);
    CHECK(sim::lane_change_profile(1.0) == 1.0);
    CHECK(sim::lane_change_profile_d1(0.0) == 0.0);
    CHECK(sim::lane_change_profile_d1(1.0) == 0.0);
    CHECK(sim::lane_change_profile_d2(0.0) == 0.0);
    CHECK(std::abs(sim::lane_change_profile_d2(1.0)) < 1e-12);
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const double v = sim::lane_change_profile(i / 1000.0);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(sim::lane_change_profile(1.01), DomainError);
    CHECK_THROWS_AS(sim::lane_change_profile(-0.01), DomainError);
}

TEST_CASE("no lane changes means no crossings anywhere") {
    sim::SimConfig cfg;
    cfg.n_situations = 20;
    cfg.lane_change_rate = 0.0;
    auto ds = sim::generate_dataset(cfg);
    prep::label_dataset(ds, 5.0);
    for (const auto& s : ds.situations)
        for (const auto& smp : s.samples) {
            CHECK(smp.ttlcl == kInf);
            CHECK(smp.ttlcr == kInf);
        }
}

TEST_CASE("generation is a pure function of config and index") {
    sim::SimConfig cfg;
    cfg.n_situations = 8;
    cfg.rng_seed = 99;
    CHECK(sim::generate_dataset(cfg) == sim::generate_dataset(cfg));
    CHECK(sim::generate_situation(cfg, 5) == sim::generate_dataset(cfg).situations[5]);
    cfg.rng_seed = 100;
    CHECK_FALSE(sim::generate_situation(cfg, 5) == sim::generate_dataset(sim::SimConfig{}).situations[0]);
}

TEST_CASE("kinematic consistency of y and v_y") {
    sim::SimConfig cfg;
    cfg.n_situations = 30;
    const auto ds = sim::generate_dataset(cfg);
    const auto iv = ds.catalog.index("v_y");
    const auto ix = ds.catalog.index("v_x");
    for (const auto& s : ds.situations)
        for (std::size_t k = 1; k + 1 < s.samples.size(); ++k) {
            // central difference against the emitted speed at the middle frame
            const double vy_fd = (s.track[k + 1].y - s.track[k - 1].y) / (2 * kSamplePeriod);
            const double vx_fd = (s.track[k + 1].x - s.track[k - 1].x) / (2 * kSamplePeriod);
            CHECK(std::abs(vy_fd - s.samples[k].features[iv]) < 0.05);
            CHECK(std::abs(vx_fd - s.samples[k].features[ix]) < 0.05);
        }
}

TEST_CASE("lane change count follows the rate") {
    sim::SimConfig cfg;
    cfg.n_situations = 400;
    cfg.lane_change_rate = 0.5;
    std::size_t lc = 0;
    for (std::size_t i = 0; i < cfg.n_situations; ++i) lc += sim::planned_maneuver(cfg, i) != Maneuver::FLW;
    // binomial sd is 10 here
    CHECK(lc > 200 - 40);
    CHECK(lc < 200 + 40);
}

TEST_CASE("all features finite and nominal codes in their catalogs") {
    sim::SimConfig cfg;
    cfg.n_situations = 40;
    const auto ds = sim::generate_dataset(cfg);
    for (const auto& s : ds.situations)
        for (const auto& smp : s.samples)
            for (std::size_t f = 0; f < ds.catalog.size(); ++f) {
                const double v = smp.features[f];
                REQUIRE(std::isfinite(v));
                const auto& d = ds.catalog[f];
                if (d.kind == FeatureKind::Nominal) {
                    const auto& vals = d.nominal_values;
                    CHECK(std::find(vals.begin(), vals.end(), static_cast<int>(v)) != vals.end());
                    CHECK(v == std::floor(v));
                }
            }
}

TEST_CASE("config validation") {
    sim::SimConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.duration_s = 11.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.lcl_duration_min = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

}  // TEST_SUITE sim

TEST_SUITE("derived") {

TEST_CASE("quintic profile at half progress") {
    CHECK(std::abs(sim::lane_change_profile(0.5) - 0.5) < 1e-9);
    CHECK(std::abs(sim::lane_change_profile(0.3) + sim::lane_change_profile(0.7) - 1.0) < 1e-9);
}

TEST_CASE("one forced left change of 4 s crosses the left marking exactly once") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto cfg = forced_left(4.0);
        cfg.rng_seed = seed;
        auto s = sim::generate_situation(cfg, 0);
        const auto crossings = left_crossings(s);
        REQUIRE(crossings.size() == 1);
        // the labeled crossing instant is the first frame with the center beyond the marking
        prep::label_situation(s, 5.0);
        const std::size_t k = crossings.front();
        CHECK(s.track[k].y > s.markings.front().left);
        CHECK(s.track[k - 1].y <= s.markings.front().left);
        CHECK(s.samples[0].ttlcl == doctest::Approx(frame_time(k)).epsilon(1e-12));
    }
}

TEST_CASE("crossing 3 s after a sample gives ttlcl 3 s") {
    auto cfg = forced_left(4.0, 7.99);
    cfg.lk_sigma = 0.0;
    cfg.cue_offset = 0.0;
    auto s = sim::generate_situation(cfg, 0);
    const auto crossings = left_crossings(s);
    REQUIRE(crossings.size() == 1);
    REQUIRE(frame_time(crossings.front()) == 8.0);
    prep::label_situation(s, 5.0);
    const auto i = frame_index(5.0);
    CHECK(s.samples[i].t_rec == 5.0);
    CHECK(std::abs(s.samples[i].ttlcl - 3.0) < 1e-9);
    CHECK(s.samples[i].ttlcr == kInf);
    CHECK(s.samples[i].label == Maneuver::LCL);
    // after the crossing nothing further happens
    CHECK(s.samples[frame_index(9.0)].ttlcl == kInf);
    CHECK(s.samples[frame_index(9.0)].ttlcr == kInf);
}

}  // TEST_SUITE derived
