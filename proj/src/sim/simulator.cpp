#include "bpred/sim/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bpred/core/rng.hpp"

namespace bpred::sim {

void SimConfig::validate() const {
    if (n_situations == 0) throw DomainError("sim.n_situations must be positive");
    if (duration_s < horizon_s + 7.0)
        throw DomainError("sim.duration_s must be at least horizon + 7 s");
    if (!(lane_width > 0.0)) throw DomainError("sim.lane_width must be positive");
    if (n_lanes < 2) throw DomainError("sim.n_lanes must be at least 2");
    if (lane_change_rate < 0.0 || lane_change_rate > 1.0)
        throw DomainError("sim.lane_change_rate must lie in [0, 1]");
    if (lcl_duration_min < 2.0 || lcl_duration_max > 6.0 || lcl_duration_min > lcl_duration_max)
        throw DomainError("sim.lcl_duration range must lie within [2, 6] s");
    if (lcr_duration_min < 2.0 || lcr_duration_max > 6.0 || lcr_duration_min > lcr_duration_max)
        throw DomainError("sim.lcr_duration range must lie within [2, 6] s");
    if (!(speed_min > 0.0) || speed_max < speed_min) throw DomainError("sim speed range is invalid");
    if (neighbor_rate < 0.0 || neighbor_rate > 1.0) throw DomainError("sim.neighbor_rate must lie in [0, 1]");
    if (!(lk_sigma >= 0.0) || !(lk_period > 0.0) || !(lk_decay > 0.0))
        throw DomainError("sim lane keeping parameters are invalid");
    if (forced_lc_duration && (*forced_lc_duration < 2.0 || *forced_lc_duration > 6.0))
        throw DomainError("forced lane change duration must lie within [2, 6] s");
}

double lane_change_profile(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("lane_change_profile: progress outside [0, 1]");
    const double s3 = s * s * s;
    return s3 * (10.0 - 15.0 * s + 6.0 * s * s);
}

double lane_change_profile_d1(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("lane_change_profile: progress outside [0, 1]");
    const double s2 = s * s;
    return 30.0 * s2 * (1.0 - 2.0 * s + s2);
}

double lane_change_profile_d2(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("lane_change_profile: progress outside [0, 1]");
    return 60.0 * s - 180.0 * s * s + 120.0 * s * s * s;
}

namespace {

struct FeatureSpec {
    const char* id;
    FeatureKind kind;
    const char* unit;
    std::vector<int> values;
    const char* description;
};

const std::array<const char*, 5> kFrontPartners{"fl", "f", "fr", "l", "r"};

Catalog build_catalog() {
    using K = FeatureKind;
    Catalog c;
    auto add = [&](std::string id, K kind, std::string unit, std::vector<int> values, std::string desc) {
        c.add(FeatureDescriptor{std::move(id), kind, std::move(unit), std::move(values), std::move(desc)});
    };
    for (const char* p : kFrontPartners) {
        const std::string r(p);
        add("actv_" + r, K::Nominal, "", {0, 1}, "activity status of relation partner " + r);
        add("d_rel_" + r + "_x", K::Continuous, "m", {}, "longitudinal distance to " + r);
        add("d_rel_" + r + "_y", K::Continuous, "m", {}, "lateral distance to " + r);
        add("v_rel_" + r + "_x", K::Continuous, "m/s", {}, "relative longitudinal speed of " + r);
        add("v_rel_" + r + "_y", K::Continuous, "m/s", {}, "relative lateral speed of " + r);
    }
    add("d_rel_f_v", K::Continuous, "m", {}, "curvilinear longitudinal distance to f");
    add("v_rel_f_v", K::Continuous, "m/s", {}, "curvilinear relative longitudinal speed of f");
    add("d_rel_f_u", K::Continuous, "m", {}, "curvilinear lateral distance to f");
    add("v_rel_f_u", K::Continuous, "m/s", {}, "curvilinear relative lateral speed of f");
    for (const char* p : {"rl", "rr"}) {
        const std::string r(p);
        add("mov_" + r, K::Nominal, "", {0, 1}, "movement status of " + r);
        add("d_rel_" + r + "_y", K::Continuous, "m", {}, "lateral distance to " + r);
    }
    add("fog_f", K::Nominal, "", {0, 1}, "front fog lamp");
    add("fog_r", K::Nominal, "", {0, 1}, "rear fog lamp");
    add("fog_rl", K::Nominal, "", {0, 1}, "rear left fog lamp");
    add("fog_rr", K::Nominal, "", {0, 1}, "rear right fog lamp");
    add("wpr", K::Nominal, "", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}, "wiper level");
    add("d_y_ml", K::Continuous, "m", {}, "distance from vehicle center to the left marking");
    add("d_y_mr", K::Continuous, "m", {}, "distance from vehicle center to the right marking");
    add("d_y_cl", K::Continuous, "m", {}, "signed distance from vehicle center to the lane centerline");
    add("v_x", K::Continuous, "m/s", {}, "longitudinal speed");
    add("v_y", K::Continuous, "m/s", {}, "lateral speed");
    add("a_x", K::Continuous, "m/s^2", {}, "longitudinal acceleration");
    add("a_y", K::Continuous, "m/s^2", {}, "lateral acceleration");
    add("psi", K::Continuous, "deg", {}, "heading relative to the lane direction");
    add("t_ml", K::Nominal, "", {0, 1, 2}, "left marking type (0 none, 1 continuous, 2 broken)");
    add("t_mr", K::Nominal, "", {0, 1, 2}, "right marking type (0 none, 1 continuous, 2 broken)");
    add("c_ml", K::Nominal, "", {0, 1, 2}, "left marking color (0 none, 1 white, 2 yellow)");
    add("c_mr", K::Nominal, "", {0, 1, 2}, "right marking color (0 none, 1 white, 2 yellow)");
    add("nlanes_cam", K::Nominal, "", {0, 1, 2, 3}, "parallel lanes observed by the camera");
    add("nlanes_map", K::Nominal, "", {0, 1, 2, 3, 4, 5}, "lanes stored in the map");
    add("cntr", K::Nominal, "", {0, 1, 2}, "country");
    add("tnl", K::Nominal, "", {0, 1}, "tunnel indicator");
    add("brd", K::Nominal, "", {0, 1}, "bridge indicator");
    add("v_lim", K::Nominal, "", {1, 2, 3, 4, 5, 6, 7, 8}, "speed limit class");
    add("t_a", K::Nominal, "", {0, 1, 2}, "type of next approach");
    add("t_e", K::Nominal, "", {0, 1, 2}, "type of next exit");
    add("w_ml", K::Continuous, "m", {}, "width of the left marking");
    add("w_mr", K::Continuous, "m", {}, "width of the right marking");
    add("w_lane", K::Continuous, "m", {}, "lane width");
    add("d_x_a", K::Continuous, "m", {}, "distance to the next approach");
    add("d_x_e", K::Continuous, "m", {}, "distance to the next exit");
    add("c0", K::Continuous, "1/m", {}, "road curvature");
    add("c1", K::Continuous, "1/m^2", {}, "curvature derivative");
    return c;
}

struct Vehicle {
    int lane;
    double s0;
    double v;
    double s(double t) const { return s0 + v * t; }
};

struct Plan {
    Maneuver maneuver = Maneuver::FLW;
    int lane0 = 0;
    double lc_duration = 4.0;
    double t_cross = 0.0;
    double v_des = 30.0;
    double v_init = 30.0;
    std::vector<Vehicle> others;
};

constexpr double kDt = 0.02;         // integration step
constexpr int kSub = 5;              // integration steps per frame
constexpr double kAlongside = 5.0;   // half window for l / r slots, m

Plan make_plan(const SimConfig& cfg, std::size_t index, Rng& rng) {
    Plan p;
    const int n = cfg.n_lanes;
    bool lc;
    if (cfg.forced_maneuver)
        lc = *cfg.forced_maneuver != Maneuver::FLW;
    else
        lc = rng.bernoulli(cfg.lane_change_rate);

    if (lc) {
        Maneuver dir;
        if (cfg.forced_maneuver) {
            dir = *cfg.forced_maneuver;
            p.lane0 = dir == Maneuver::LCL ? static_cast<int>(rng.index(static_cast<std::size_t>(n - 1)))
                                           : 1 + static_cast<int>(rng.index(static_cast<std::size_t>(n - 1)));
        } else {
            p.lane0 = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
            if (p.lane0 == 0)
                dir = Maneuver::LCL;
            else if (p.lane0 == n - 1)
                dir = Maneuver::LCR;
            else
                dir = rng.bernoulli(0.5) ? Maneuver::LCL : Maneuver::LCR;
        }
        p.maneuver = dir;
    } else {
        p.lane0 = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
        p.maneuver = Maneuver::FLW;
    }
    const bool right = p.maneuver == Maneuver::LCR;
    p.lc_duration = cfg.forced_lc_duration
                        ? *cfg.forced_lc_duration
                        : rng.uniform(right ? cfg.lcr_duration_min : cfg.lcl_duration_min,
                                      right ? cfg.lcr_duration_max : cfg.lcl_duration_max);
    const double t_lo = cfg.horizon_s + 1.5;
    const double t_hi = cfg.duration_s - 2.5;
    p.t_cross = cfg.forced_crossing_time ? *cfg.forced_crossing_time : rng.uniform(t_lo, t_hi);
    p.v_des = rng.uniform(cfg.speed_min, cfg.speed_max);
    p.v_init = p.v_des + rng.normal(0.0, 1.0);

    // Leader in the ego lane. Overtaking is motivated by a slower leader,
    // returning right by a free road ahead.
    bool leader = false;
    double gap = 0.0, dv = 0.0;
    switch (p.maneuver) {
        case Maneuver::LCL:
            leader = rng.bernoulli(0.85);
            gap = rng.uniform(25.0, 60.0);
            dv = -rng.uniform(2.0, 7.0);
            break;
        case Maneuver::LCR:
            leader = rng.bernoulli(0.3);
            gap = rng.uniform(30.0, 90.0);
            dv = rng.uniform(0.0, 4.0);
            break;
        case Maneuver::FLW:
            leader = rng.bernoulli(0.6);
            gap = rng.uniform(20.0, 90.0);
            dv = rng.uniform(-5.0, 3.0);
            break;
    }
    if (leader) p.others.push_back({p.lane0, gap, p.v_des + dv});

    const int target = p.maneuver == Maneuver::LCL ? p.lane0 + 1
                       : p.maneuver == Maneuver::LCR ? p.lane0 - 1
                                                     : -1;
    const bool block_left = p.maneuver == Maneuver::FLW && leader && dv < 0.0 && p.lane0 < n - 1 &&
                            rng.bernoulli(0.7);
    for (int lane = 0; lane < n; ++lane) {
        if (lane == p.lane0) continue;
        if (lane == target) {
            // keep the target lane clear around the maneuver
            if (rng.bernoulli(cfg.neighbor_rate))
                p.others.push_back({lane, rng.uniform(60.0, 120.0), p.v_des + rng.uniform(1.0, 4.0)});
            if (rng.bernoulli(cfg.neighbor_rate))
                p.others.push_back({lane, -rng.uniform(50.0, 100.0), p.v_des - rng.uniform(1.0, 4.0)});
            continue;
        }
        if (rng.bernoulli(cfg.neighbor_rate))
            p.others.push_back({lane, rng.uniform(15.0, 90.0), p.v_des + rng.uniform(-4.0, 4.0)});
        const bool block = block_left && lane == p.lane0 + 1;
        if (block || rng.bernoulli(cfg.neighbor_rate))
            p.others.push_back({lane, rng.uniform(-6.0, 6.0), p.v_init + rng.uniform(-0.5, 0.5)});
        if (rng.bernoulli(cfg.neighbor_rate))
            p.others.push_back({lane, -rng.uniform(15.0, 60.0), p.v_des + rng.uniform(-4.0, 4.0)});
    }
    (void)index;
    return p;
}

/// Intelligent-driver-model acceleration.
double idm(double v, double v_des, double gap, double v_lead, bool has_leader) {
    constexpr double a_max = 1.0, b = 2.0, s0 = 2.0, headway = 1.2;
    double acc = 1.0 - std::pow(v / v_des, 4.0);
    if (has_leader) {
        const double s_star = s0 + std::max(0.0, v * headway + v * (v - v_lead) / (2.0 * std::sqrt(a_max * b)));
        const double s = std::max(gap, 0.5);
        acc -= (s_star / s) * (s_star / s);
    }
    return std::clamp(a_max * acc, -8.0, a_max);
}

struct LateralManeuver {
    double sign = 0.0;   // +1 left, -1 right, 0 none
    double onset = 0.0;
    double duration = 1.0;
    double cue_offset = 0.0;
    double cue_time = 1.0;
    double width = 3.5;

    /// Offset, velocity, acceleration of the maneuver component at time t.
    std::array<double, 3> eval(double t) const {
        if (sign == 0.0) return {0.0, 0.0, 0.0};
        const double u = std::clamp((t - onset) / duration, 0.0, 1.0);
        const double du = (t > onset && t < onset + duration) ? 1.0 / duration : 0.0;
        const double p = lane_change_profile(u);
        const double p1 = lane_change_profile_d1(u) * du;
        const double p2 = lane_change_profile_d2(u) * du * du;
        const double cu = std::clamp((t - (onset - cue_time)) / cue_time, 0.0, 1.0);
        const double dcu = (t > onset - cue_time && t < onset) ? 1.0 / cue_time : 0.0;
        const double c = cue_offset * lane_change_profile(cu);
        const double c1 = cue_offset * lane_change_profile_d1(cu) * dcu;
        const double c2 = cue_offset * lane_change_profile_d2(cu) * dcu * dcu;
        const double y = width * p + c * (1.0 - p);
        const double v = width * p1 + c1 * (1.0 - p) - c * p1;
        const double a = width * p2 + c2 * (1.0 - p) - 2.0 * c1 * p1 - c * p2;
        return {sign * y, sign * v, sign * a};
    }
};

}  // namespace

Catalog feature_catalog() {
    static const Catalog cat = build_catalog();
    return cat;
}

std::vector<std::string> noise_feature_ids() {
    return {"fog_f", "fog_r", "fog_rl", "fog_rr", "wpr",  "c_ml",  "c_mr", "tnl", "brd",
            "v_lim", "t_a",   "t_e",    "w_ml",   "w_mr", "w_lane", "d_x_a", "d_x_e", "c0", "c1"};
}

std::vector<std::pair<std::string, std::string>> duplicate_feature_pairs() {
    return {{"d_rel_f_x", "d_rel_f_v"}, {"v_rel_f_x", "v_rel_f_v"}, {"v_rel_f_y", "v_rel_f_u"}};
}

std::vector<std::string> constant_feature_ids() { return {"nlanes_cam", "nlanes_map", "cntr"}; }

Maneuver planned_maneuver(const SimConfig& config, std::size_t situation_index) {
    Rng rng(mix_seed(config.rng_seed, situation_index));
    return make_plan(config, situation_index, rng).maneuver;
}

Situation generate_situation(const SimConfig& cfg, std::size_t situation_index) {
    static const Catalog cat = build_catalog();
    Rng rng(mix_seed(cfg.rng_seed, situation_index));
    const Plan plan = make_plan(cfg, situation_index, rng);

    const double w = cfg.lane_width;
    const auto n_frames = static_cast<std::size_t>(std::llround(cfg.duration_s / kSamplePeriod)) + 1;

    LateralManeuver lat;
    if (plan.maneuver != Maneuver::FLW) {
        lat.sign = plan.maneuver == Maneuver::LCL ? 1.0 : -1.0;
        lat.duration = plan.lc_duration;
        lat.onset = plan.t_cross - 0.5 * plan.lc_duration;
        lat.cue_offset = cfg.cue_offset;
        lat.cue_time = cfg.cue_time;
        lat.width = w;
    }

    // Situation-level chaff.
    const int fog_f = rng.bernoulli(0.05), fog_r = rng.bernoulli(0.05);
    const int fog_rl = rng.bernoulli(0.05), fog_rr = rng.bernoulli(0.05);
    const int wpr = rng.bernoulli(0.3) ? 1 + static_cast<int>(rng.index(15)) : 0;
    const int c_ml = rng.bernoulli(0.1) ? 2 : 1, c_mr = rng.bernoulli(0.1) ? 2 : 1;
    const int tnl = rng.bernoulli(0.05), brd = rng.bernoulli(0.1);
    const int v_lim = 1 + static_cast<int>(rng.index(8));
    const int t_a = static_cast<int>(rng.index(3)), t_e = static_cast<int>(rng.index(3));
    const double d_a0 = rng.uniform(300.0, 5000.0), d_e0 = rng.uniform(300.0, 5000.0);
    const double c0_sit = rng.normal(0.0, 2e-4), c1_sit = rng.normal(0.0, 1e-6);

    // Lane keeping wander: d'' = -w0^2 d - 2 z w0 d' + q xi
    const double w0 = 2.0 * std::numbers::pi / cfg.lk_period;
    const double zw = 1.0 / cfg.lk_decay;
    const double q = cfg.lk_sigma * std::sqrt(4.0 * zw * w0 * w0);
    double wd = rng.normal(0.0, cfg.lk_sigma);
    double wv = rng.normal(0.0, cfg.lk_sigma * w0);
    double wa = -w0 * w0 * wd - 2.0 * zw * wv;

    // Longitudinal state
    double s = 0.0, v = plan.v_init, a = 0.0;
    double a_noise = rng.normal(0.0, 0.2);
    constexpr double tau_a = 3.0, sigma_a = 0.25;

    const double y_center0 = (plan.lane0 + 0.5) * w;

    Situation sit;
    sit.situation_id = static_cast<std::int64_t>(situation_index);
    sit.lane_width = w;
    sit.samples.reserve(n_frames);
    sit.track.reserve(n_frames);
    sit.markings.reserve(n_frames);

    const std::size_t nf = cat.size();
    const auto idx = [&](const char* id) { return cat.index(id); };
    const std::size_t i_dyml = idx("d_y_ml"), i_dymr = idx("d_y_mr"), i_dycl = idx("d_y_cl");
    const std::size_t i_vx = idx("v_x"), i_vy = idx("v_y"), i_ax = idx("a_x"), i_ay = idx("a_y");
    const std::size_t i_psi = idx("psi");

    auto assigned_lane = [&](double y) {
        return std::clamp(static_cast<int>(std::floor(y / w)), 0, cfg.n_lanes - 1);
    };

    for (std::size_t k = 0; k < n_frames; ++k) {
        const double t = frame_time(k);
        if (k > 0) {
            for (int sub = 0; sub < kSub; ++sub) {
                const double tt = t - kSamplePeriod + sub * kDt;
                // leader for car following: nearest vehicle ahead in the assigned lane
                const auto lat_now = lat.eval(tt);
                const int lane = assigned_lane(y_center0 + wd + lat_now[0]);
                double gap = 1e9, v_lead = 0.0;
                bool has_leader = false;
                for (const auto& o : plan.others) {
                    if (o.lane != lane) continue;
                    const double ds = o.s(tt) - s;
                    if (ds > 0.0 && ds < gap) {
                        gap = ds;
                        v_lead = o.v;
                        has_leader = true;
                    }
                }
                a_noise += -a_noise / tau_a * kDt + sigma_a * std::sqrt(2.0 * kDt / tau_a) * rng.normal();
                a = idm(v, plan.v_des, gap - 5.0, v_lead, has_leader && gap < 150.0) + a_noise;
                if (v + a * kDt < 0.0) a = -v / kDt;
                s += v * kDt + 0.5 * a * kDt * kDt;
                v += a * kDt;

                // semi-implicit Euler on the wander
                wa = -w0 * w0 * wd - 2.0 * zw * wv;
                wv += wa * kDt + q * std::sqrt(kDt) * rng.normal();
                wd += wv * kDt;
            }
        }

        const auto lat_now = lat.eval(t);
        const double y = y_center0 + wd + lat_now[0];
        const double vy = wv + lat_now[1];
        const double ay = -w0 * w0 * wd - 2.0 * zw * wv + lat_now[2];
        const int lane = assigned_lane(y);
        const Markings m{(lane + 1) * w, lane * w};

        Sample smp;
        smp.situation_id = sit.situation_id;
        smp.t_rec = t;
        smp.features.assign(nf, 0.0);
        auto& f = smp.features;
        f[i_dyml] = m.left - y + rng.normal(0.0, 0.02);
        f[i_dymr] = y - m.right + rng.normal(0.0, 0.02);
        f[i_dycl] = y - 0.5 * (m.left + m.right) + rng.normal(0.0, 0.02);
        f[i_vx] = v;
        f[i_vy] = vy;
        f[i_ax] = a;
        f[i_ay] = ay;
        const double psi = std::atan2(vy, std::max(v, 0.1));
        f[i_psi] = psi * 180.0 / std::numbers::pi;

        // relation partners
        struct Slot {
            bool present = false;
            double ds = 0.0;
            double dy = 0.0;
            double dv = 0.0;
        };
        std::array<Slot, 5> front{};  // fl f fr l r
        Slot rl, rr;
        auto consider = [](Slot& slot, double ds, double dy, double dv) {
            if (!slot.present || std::abs(ds) < std::abs(slot.ds)) slot = {true, ds, dy, dv};
        };
        for (const auto& o : plan.others) {
            const double ds = o.s(t) - s;
            const double dy = (o.lane + 0.5) * w - y;
            const double dv = o.v - v;
            const int rel = o.lane - lane;
            if (rel == 0) {
                if (ds > 0.0) consider(front[1], ds, dy, dv);
            } else if (rel == 1) {
                if (ds > kAlongside)
                    consider(front[0], ds, dy, dv);
                else if (ds >= -kAlongside)
                    consider(front[3], ds, dy, dv);
                else
                    consider(rl, ds, dy, dv);
            } else if (rel == -1) {
                if (ds > kAlongside)
                    consider(front[2], ds, dy, dv);
                else if (ds >= -kAlongside)
                    consider(front[4], ds, dy, dv);
                else
                    consider(rr, ds, dy, dv);
            }
        }
        const double cpsi = std::cos(psi), spsi = std::sin(psi);
        for (std::size_t p = 0; p < kFrontPartners.size(); ++p) {
            const std::string r(kFrontPartners[p]);
            const Slot& sl = front[p];
            const bool alongside = p >= 3;
            const std::size_t base = cat.index("actv_" + r);
            if (sl.present) {
                f[base] = 1.0;
                f[base + 1] = sl.ds * cpsi + sl.dy * spsi + rng.normal(0.0, 0.1);
                f[base + 2] = -sl.ds * spsi + sl.dy * cpsi + rng.normal(0.0, 0.05);
                f[base + 3] = sl.dv + rng.normal(0.0, 0.05);
                f[base + 4] = -vy + rng.normal(0.0, 0.02);
            } else {
                f[base] = 0.0;
                f[base + 1] = alongside ? 0.0 : kAbsentDistance;
                f[base + 2] = 0.0;
                f[base + 3] = 0.0;
                f[base + 4] = 0.0;
            }
        }
        if (front[1].present) {
            f[cat.index("d_rel_f_v")] = front[1].ds + rng.normal(0.0, 0.1);
            f[cat.index("v_rel_f_v")] = front[1].dv + rng.normal(0.0, 0.05);
            f[cat.index("d_rel_f_u")] = front[1].dy + rng.normal(0.0, 0.05);
            f[cat.index("v_rel_f_u")] = -vy + rng.normal(0.0, 0.02);
        } else {
            f[cat.index("d_rel_f_v")] = kAbsentDistance;
            f[cat.index("v_rel_f_v")] = 0.0;
            f[cat.index("d_rel_f_u")] = 0.0;
            f[cat.index("v_rel_f_u")] = 0.0;
        }
        f[cat.index("mov_rl")] = rl.present ? 1.0 : 0.0;
        f[cat.index("d_rel_rl_y")] = rl.present ? rl.dy + rng.normal(0.0, 0.05) : 0.0;
        f[cat.index("mov_rr")] = rr.present ? 1.0 : 0.0;
        f[cat.index("d_rel_rr_y")] = rr.present ? rr.dy + rng.normal(0.0, 0.05) : 0.0;

        f[cat.index("fog_f")] = fog_f;
        f[cat.index("fog_r")] = fog_r;
        f[cat.index("fog_rl")] = fog_rl;
        f[cat.index("fog_rr")] = fog_rr;
        f[cat.index("wpr")] = wpr;
        f[cat.index("t_ml")] = lane == cfg.n_lanes - 1 ? 1.0 : 2.0;
        f[cat.index("t_mr")] = lane == 0 ? 1.0 : 2.0;
        f[cat.index("c_ml")] = c_ml;
        f[cat.index("c_mr")] = c_mr;
        f[cat.index("nlanes_cam")] = std::min(cfg.n_lanes, 3);
        f[cat.index("nlanes_map")] = std::min(cfg.n_lanes, 5);
        f[cat.index("cntr")] = 0.0;
        f[cat.index("tnl")] = tnl;
        f[cat.index("brd")] = brd;
        f[cat.index("v_lim")] = v_lim;
        f[cat.index("t_a")] = t_a;
        f[cat.index("t_e")] = t_e;
        f[cat.index("w_ml")] = 0.15 + rng.normal(0.0, 0.01);
        f[cat.index("w_mr")] = 0.15 + rng.normal(0.0, 0.01);
        f[cat.index("w_lane")] = w + rng.normal(0.0, 0.03);
        f[cat.index("d_x_a")] = std::max(0.0, d_a0 - s);
        f[cat.index("d_x_e")] = std::max(0.0, d_e0 - s);
        f[cat.index("c0")] = c0_sit + rng.normal(0.0, 1e-5);
        f[cat.index("c1")] = c1_sit + rng.normal(0.0, 1e-7);

        sit.samples.push_back(std::move(smp));
        sit.track.push_back({s, y});
        sit.markings.push_back(m);
    }
    return sit;
}

Dataset generate_dataset(const SimConfig& config) {
    config.validate();
    Dataset ds;
    ds.catalog = feature_catalog();
    ds.situations.resize(config.n_situations);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = 0; i < config.n_situations; ++i) ds.situations[i] = generate_situation(config, i);
    return ds;
}

}  // namespace bpred::sim
