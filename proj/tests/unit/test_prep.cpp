#include <doctest.h>

#include <map>
#include <set>

#include "bpred/prep/prep.hpp"
#include "bpred/sim/simulator.hpp"
#include "helpers.hpp"

using namespace bpred;

namespace {

Dataset labeled_sim(std::size_t n, std::uint64_t seed = 5) {
    sim::SimConfig cfg;
    cfg.n_situations = n;
    cfg.rng_seed = seed;
    auto ds = sim::generate_dataset(cfg);
    prep::label_dataset(ds, 5.0);
    return ds;
}

// Straight-line situation: x = v t, y = 0.
Situation straight(std::int64_t id, std::size_t frames, double v) {
    Situation s;
    s.situation_id = id;
    for (std::size_t k = 0; k < frames; ++k) {
        Sample smp;
        smp.situation_id = id;
        smp.t_rec = frame_time(k);
        smp.features = {static_cast<double>(k)};
        s.samples.push_back(smp);
        s.track.push_back({v * frame_time(k), 0.0});
        s.markings.push_back({1.75, -1.75});
    }
    return s;
}

}  // namespace

TEST_SUITE("prep") {

TEST_CASE("labeling rule branches") {
    CHECK(prep::assign_label(3.0, kInf, 5.0) == Maneuver::LCL);
    CHECK(prep::assign_label(kInf, 2.0, 5.0) == Maneuver::LCR);
    CHECK(prep::assign_label(kInf, kInf, 5.0) == Maneuver::FLW);
    CHECK(prep::assign_label(5.0, kInf, 5.0) == Maneuver::LCL);
    CHECK(prep::assign_label(2.0, 2.0, 5.0) == Maneuver::FLW);
}

TEST_CASE("property: exactly one label branch fires and agrees with the inequalities") {
    Rng rng(11);
    for (int i = 0; i < 5000; ++i) {
        auto draw = [&] { return rng.bernoulli(0.2) ? kInf : rng.uniform(0.0, 10.0); };
        const double l = draw(), r = draw(), h = rng.uniform(1.0, 8.0);
        const auto m = prep::assign_label(l, r, h);
        const bool is_l = l <= h && l < r, is_r = r <= h && r < l;
        CHECK(!(is_l && is_r));
        CHECK(m == (is_l ? Maneuver::LCL : is_r ? Maneuver::LCR : Maneuver::FLW));
    }
}

TEST_CASE("stored labels agree with the labeling rule") {
    const auto ds = labeled_sim(30);
    for (const auto& s : ds.situations)
        for (const auto& smp : s.samples) CHECK(smp.label == prep::assign_label(smp.ttlcl, smp.ttlcr, 5.0));
}

TEST_CASE("folds partition situations and are balanced") {
    const auto ds = labeled_sim(60);
    const auto fa = prep::split_folds(ds, {}, 6, 5.0, 3);
    REQUIRE(fa.folds.size() == 6);
    std::map<std::int64_t, int> seen;
    for (std::size_t f = 0; f < fa.folds.size(); ++f) {
        std::array<std::size_t, 3> c{};
        for (const auto& r : fa.folds[f]) {
            const auto id = ds.situations[r.situation].situation_id;
            CHECK(fa.fold_of.at(id) == static_cast<int>(f) + 1);
            ++c[index_of(ds.situations[r.situation].samples[r.sample].label)];
            CHECK(prep::covers_horizon(ds.situations[r.situation], r.sample, 5.0));
        }
        CHECK(c[0] == c[1]);
        CHECK(c[1] == c[2]);
    }
    for (const auto& [id, f] : fa.fold_of) CHECK(seen.emplace(id, f).second);
}

TEST_CASE("six situations over six folds: one each") {
    const auto ds = labeled_sim(6);
    const auto fa = prep::split_folds(ds, {}, 6, 5.0, 1);
    std::map<int, int> per_fold;
    for (const auto& [id, f] : fa.fold_of) ++per_fold[f];
    CHECK(per_fold.size() == 6);
    for (const auto& [f, n] : per_fold) CHECK(n == 1);
    CHECK_THROWS_AS(prep::split_folds(labeled_sim(5), {}, 6, 5.0, 1), DomainError);
}

TEST_CASE("straight line explodes to x = v t") {
    const auto s = straight(1, 120, 25.0);
    prep::HorizonConfig cfg;
    const auto ex = prep::explode_training({&s}, cfg, 4);
    REQUIRE(!ex.rows.empty());
    for (const auto& r : ex.rows) {
        CHECK(std::abs(r.x - 25.0 * r.t) < 1e-9);
        CHECK(r.y == 0.0);
        CHECK(r.t >= -1.0);
        CHECK(r.t <= 6.0);
    }
    // frames 10..59 have the full [-1, 6] span
    CHECK(ex.starts.size() == 50);
    CHECK(ex.rows.size() == 50 * 71);
    // feature vectors are copied bit-exactly
    for (const auto& st : ex.starts) CHECK(st.features == s.samples[frame_index(st.t_rec)].features);
}

TEST_CASE("test explosion: 51 rows per start, zero at t = 0") {
    const auto s = straight(1, 60, 30.0);
    const auto ex = prep::explode_test({&s}, prep::HorizonConfig{});
    CHECK(ex.starts.size() == 10);
    CHECK(ex.rows.size() == ex.starts.size() * 51);
    for (std::size_t i = 0; i < ex.rows.size(); i += 51) {
        CHECK(ex.rows[i].t == 0.0);
        CHECK(ex.rows[i].x == 0.0);
        CHECK(ex.rows[i].y == 0.0);
        CHECK(ex.rows[i + 50].t == 5.0);
    }
}

TEST_CASE("tail sigma from the percentiles") { CHECK(prep::HorizonConfig{}.tail_sigma() == doctest::Approx(1.0 / 3)); }

TEST_CASE("mirroring doubles rows and reflects both probabilities") {
    std::vector<prep::ExplodedRow> rows{{0, 1.0, 2.0, 3.0, 0.2, 0.8}, {0, 1.5, 2.5, 3.5, 0.0, 1.0}};
    const auto m = prep::mirror_probabilities(rows);
    REQUIRE(m.size() == 4);
    CHECK(m[1].p_lcl == doctest::Approx(-0.2));
    CHECK(m[1].p_lcr == doctest::Approx(1.2));
    CHECK(m[1].t == 1.0);
    CHECK(m[1].x == 2.0);
    CHECK(m[3].p_lcl == 0.0);
    CHECK(m[3].p_lcr == 1.0);
    CHECK_THROWS_AS(prep::mirror_probability(1.2), DomainError);
    CHECK_THROWS_AS(prep::mirror_probability(-0.1), DomainError);
}

TEST_CASE("expert starts undersample lane following to the mean lane change count") {
    prep::ExplodedSet set;
    for (int i = 0; i < 100; ++i) set.starts.push_back({0, 0.0, Maneuver::FLW, {}, 0, 0});
    for (int i = 0; i < 20; ++i) set.starts.push_back({0, 0.0, Maneuver::LCL, {}, 0, 0});
    for (int i = 0; i < 30; ++i) set.starts.push_back({0, 0.0, Maneuver::LCR, {}, 0, 0});
    const auto by = prep::expert_starts(set, 1);
    CHECK(by[0].size() == 20);
    CHECK(by[1].size() == 25);
    CHECK(by[2].size() == 30);
}

}  // TEST_SUITE prep

TEST_SUITE("derived") {

TEST_CASE("label with both times beyond the horizon is FLW") {
    CHECK(prep::assign_label(5.1, 6.0, 5.0) == Maneuver::FLW);
}

TEST_CASE("fold with 100 FLW, 20 LCL, 30 LCR balances to 20 each") {
    Dataset ds;
    Situation s;
    std::vector<prep::SampleRef> refs;
    auto add = [&](Maneuver m, int n) {
        for (int i = 0; i < n; ++i) {
            Sample smp;
            smp.label = m;
            refs.push_back({0, static_cast<std::uint32_t>(s.samples.size())});
            s.samples.push_back(smp);
        }
    };
    add(Maneuver::FLW, 100);
    add(Maneuver::LCL, 20);
    add(Maneuver::LCR, 30);
    ds.situations.push_back(s);
    const auto kept = prep::balance_classes(ds, refs, 9);
    std::array<std::size_t, 3> c{};
    for (const auto& r : kept) ++c[index_of(s.samples[r.sample].label)];
    CHECK(c == std::array<std::size_t, 3>{20, 20, 20});
    CHECK(std::is_sorted(kept.begin(), kept.end()));
}

TEST_CASE("mirroring at one half goes to the upper branch") {
    CHECK(prep::mirror_probability(0.5) == 1.5);
    CHECK(prep::mirror_probability(0.2) == -0.2);
    CHECK(prep::mirror_probability(0.8) == doctest::Approx(1.2).epsilon(1e-12));
}

}  // TEST_SUITE derived
