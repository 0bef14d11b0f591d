#include "bpred/prep/prep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "bpred/core/rng.hpp"
#include "bpred/core/text.hpp"

namespace bpred::prep {

std::vector<double> HorizonConfig::train_times() const {
    std::vector<double> out;
    const auto lo = static_cast<long>(std::llround(-train_lead * 10.0));
    const auto hi = static_cast<long>(std::llround((horizon + train_tail) * 10.0));
    for (long k = lo; k <= hi; ++k) out.push_back(static_cast<double>(k) / 10.0);
    return out;
}

std::vector<double> HorizonConfig::test_times() const {
    std::vector<double> out;
    const auto hi = static_cast<long>(std::llround(horizon * 10.0));
    for (long k = 0; k <= hi; ++k) out.push_back(static_cast<double>(k) / 10.0);
    return out;
}

std::vector<std::pair<double, double>> compute_ttlc(const Situation& sit) {
    const std::size_t n = sit.samples.size();
    if (sit.markings.size() != n || sit.track.size() != n)
        throw DomainError("situation " + std::to_string(sit.situation_id) + ": missing marking or track data");
    std::vector<std::pair<double, double>> out(n, {kInf, kInf});
    for (std::size_t i = 0; i < n; ++i) {
        const Markings& m = sit.markings[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double y = sit.track[j].y;
            if (out[i].first == kInf && y > m.left) out[i].first = sit.samples[j].t_rec - sit.samples[i].t_rec;
            if (out[i].second == kInf && y < m.right) out[i].second = sit.samples[j].t_rec - sit.samples[i].t_rec;
            if (out[i].first != kInf || out[i].second != kInf) break;
        }
    }
    return out;
}

Maneuver assign_label(double ttlcl, double ttlcr, double horizon) {
    if (ttlcl <= horizon && ttlcl < ttlcr) return Maneuver::LCL;
    if (ttlcr <= horizon && ttlcr < ttlcl) return Maneuver::LCR;
    return Maneuver::FLW;
}

void label_situation(Situation& sit, double horizon) {
    const auto ttlc = compute_ttlc(sit);
    for (std::size_t i = 0; i < sit.samples.size(); ++i) {
        auto& s = sit.samples[i];
        s.ttlcl = ttlc[i].first;
        s.ttlcr = ttlc[i].second;
        s.label = assign_label(s.ttlcl, s.ttlcr, horizon);
    }
}

void label_dataset(Dataset& dataset, double horizon) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < dataset.situations.size(); ++i) label_situation(dataset.situations[i], horizon);
}

bool covers_horizon(const Situation& sit, std::size_t sample, double horizon) {
    return sit.samples[sample].t_rec + horizon <= sit.t_end() + 1e-9;
}

namespace {

// 0: neither, 1: left change only, 2: right change only, 3: both
int situation_type(const Situation& sit) {
    bool left = false, right = false;
    for (const auto& s : sit.samples) {
        left |= s.label == Maneuver::LCL;
        right |= s.label == Maneuver::LCR;
    }
    return (left ? 1 : 0) + (right ? 2 : 0);
}

std::unordered_map<std::int64_t, std::size_t> index_by_id(const Dataset& ds) {
    std::unordered_map<std::int64_t, std::size_t> idx;
    for (std::size_t i = 0; i < ds.situations.size(); ++i)
        if (!idx.emplace(ds.situations[i].situation_id, i).second)
            throw DomainError("duplicate situation id " + std::to_string(ds.situations[i].situation_id));
    return idx;
}

}  // namespace

Partition partition_dataset(const Dataset& dataset, double maneuver_fraction, double position_test_fraction,
                            std::uint64_t seed) {
    if (maneuver_fraction < 0.0 || maneuver_fraction > 1.0 || position_test_fraction < 0.0 ||
        position_test_fraction > 1.0)
        throw DomainError("partition fractions must lie in [0, 1]");
    std::array<std::vector<std::int64_t>, 4> by_type;
    for (const auto& s : dataset.situations) by_type[situation_type(s)].push_back(s.situation_id);
    Rng rng(mix_seed(seed, 0x5011));
    Partition p;
    for (auto& ids : by_type) {
        rng.shuffle(ids);
        const auto n_ma = static_cast<std::size_t>(std::llround(maneuver_fraction * static_cast<double>(ids.size())));
        const std::size_t n_po = ids.size() - n_ma;
        const auto n_te = static_cast<std::size_t>(std::llround(position_test_fraction * static_cast<double>(n_po)));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i < n_ma)
                p.maneuver.push_back(ids[i]);
            else if (i < n_ma + n_te)
                p.position_test.push_back(ids[i]);
            else
                p.position_train.push_back(ids[i]);
        }
    }
    std::sort(p.maneuver.begin(), p.maneuver.end());
    std::sort(p.position_train.begin(), p.position_train.end());
    std::sort(p.position_test.begin(), p.position_test.end());
    return p;
}

std::vector<SampleRef> balance_classes(const Dataset& dataset, const std::vector<SampleRef>& refs,
                                       std::uint64_t seed) {
    std::array<std::vector<std::size_t>, 3> by_class;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto& s = dataset.situations[refs[i].situation].samples[refs[i].sample];
        by_class[index_of(s.label)].push_back(i);
    }
    std::size_t n_min = refs.size();
    for (const auto& c : by_class) n_min = std::min(n_min, c.size());
    Rng rng(seed);
    std::vector<std::size_t> keep;
    for (auto& c : by_class) {
        rng.shuffle(c);
        keep.insert(keep.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n_min));
    }
    std::sort(keep.begin(), keep.end());
    std::vector<SampleRef> out;
    out.reserve(keep.size());
    for (auto i : keep) out.push_back(refs[i]);
    return out;
}

FoldAssignment split_folds(const Dataset& dataset, const std::vector<std::int64_t>& situation_ids, int k,
                           double horizon, std::uint64_t seed) {
    if (k < 1) throw DomainError("number of folds must be positive");
    const auto idx = index_by_id(dataset);
    std::vector<std::size_t> chosen;
    if (situation_ids.empty()) {
        for (std::size_t i = 0; i < dataset.situations.size(); ++i) chosen.push_back(i);
    } else {
        for (auto id : situation_ids) {
            auto it = idx.find(id);
            if (it == idx.end()) throw DomainError("unknown situation id " + std::to_string(id));
            chosen.push_back(it->second);
        }
        std::sort(chosen.begin(), chosen.end());
    }
    if (chosen.size() < static_cast<std::size_t>(k))
        throw DomainError("split_folds: " + std::to_string(chosen.size()) + " situations for " +
                          std::to_string(k) + " folds");

    std::array<std::vector<std::size_t>, 4> by_type;
    for (auto i : chosen) by_type[situation_type(dataset.situations[i])].push_back(i);

    Rng rng(mix_seed(seed, 0xf01d));
    FoldAssignment fa;
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
    std::size_t next = 0;
    // rarest types first so they spread evenly
    std::array<int, 4> order{3, 2, 1, 0};
    for (int type : order) {
        auto& list = by_type[static_cast<std::size_t>(type)];
        rng.shuffle(list);
        for (auto i : list) {
            members[next % static_cast<std::size_t>(k)].push_back(i);
            fa.fold_of[dataset.situations[i].situation_id] = static_cast<int>(next % static_cast<std::size_t>(k)) + 1;
            ++next;
        }
    }

    fa.folds.resize(static_cast<std::size_t>(k));
    fa.raw_counts.resize(static_cast<std::size_t>(k));
    for (std::size_t f = 0; f < members.size(); ++f) {
        auto& m = members[f];
        std::sort(m.begin(), m.end());
        std::vector<SampleRef> refs;
        std::array<std::size_t, 3> counts{};
        for (auto si : m) {
            const Situation& sit = dataset.situations[si];
            for (std::size_t j = 0; j < sit.samples.size(); ++j) {
                if (!covers_horizon(sit, j, horizon)) continue;
                refs.push_back({static_cast<std::uint32_t>(si), static_cast<std::uint32_t>(j)});
                ++counts[index_of(sit.samples[j].label)];
            }
        }
        fa.raw_counts[f] = counts;
        fa.folds[f] = balance_classes(dataset, refs, mix_seed(seed, 0xba1 + f));
    }
    return fa;
}

std::vector<const Situation*> select_situations(const Dataset& dataset, const std::vector<std::int64_t>& ids) {
    std::unordered_set<std::int64_t> want(ids.begin(), ids.end());
    std::vector<const Situation*> out;
    for (const auto& s : dataset.situations)
        if (want.count(s.situation_id)) out.push_back(&s);
    if (out.size() != want.size()) throw DomainError("select_situations: unknown situation id");
    return out;
}

namespace {

TrajectoryStart make_start(const Situation& sit, std::size_t i) {
    const Sample& s = sit.samples[i];
    return TrajectoryStart{sit.situation_id, s.t_rec, s.label, s.features, 0.0, 0.0};
}

/// Draws from the half-normal |N(0, sigma)| truncated to [0, limit].
double half_normal(Rng& rng, double sigma, double limit) {
    for (;;) {
        const double v = std::abs(rng.normal(0.0, sigma));
        if (v <= limit) return v;
    }
}

}  // namespace

ExplodedSet explode_training(const std::vector<const Situation*>& situations, const HorizonConfig& cfg,
                             std::uint64_t seed, std::size_t start_stride) {
    if (start_stride == 0) throw DomainError("start stride must be positive");
    const std::size_t n_tail = static_cast<std::size_t>(std::llround(cfg.train_lead * 10.0));
    const std::size_t n_upper = static_cast<std::size_t>(std::llround(cfg.train_tail * 10.0));
    const std::size_t n_grid = static_cast<std::size_t>(std::llround(cfg.horizon * 10.0)) + 1;
    const double sigma = cfg.tail_sigma();
    const double upper_sigma = cfg.train_tail / 3.0;

    ExplodedSet out;
    std::vector<double> times;
    for (const Situation* sit : situations) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(sit->situation_id)));
        for (std::size_t i = 0; i < sit->samples.size(); i += start_stride) {
            if (!sit->relative_position(i, -cfg.train_lead) || !sit->relative_position(i, cfg.horizon + cfg.train_tail)) {
                ++out.skipped;
                continue;
            }
            times.clear();
            for (std::size_t k = 0; k < n_tail; ++k) times.push_back(-half_normal(rng, sigma, cfg.train_lead));
            for (std::size_t k = 0; k < n_grid; ++k) {
                double t = static_cast<double>(k) / 10.0;
                if (k > 0 && k + 1 < n_grid) t += rng.uniform(-cfg.grid_jitter, cfg.grid_jitter);
                times.push_back(t);
            }
            for (std::size_t k = 0; k < n_upper; ++k)
                times.push_back(cfg.horizon + half_normal(rng, upper_sigma, cfg.train_tail));

            const auto si = static_cast<std::uint32_t>(out.starts.size());
            out.starts.push_back(make_start(*sit, i));
            for (double t : times) {
                const auto pos = *sit->relative_position(i, t);
                out.rows.push_back({si, t, pos.x, pos.y, 0.0, 0.0});
            }
        }
    }
    return out;
}

ExplodedSet explode_test(const std::vector<const Situation*>& situations, const HorizonConfig& cfg,
                         std::size_t start_stride) {
    if (start_stride == 0) throw DomainError("start stride must be positive");
    const auto grid = cfg.test_times();
    ExplodedSet out;
    for (const Situation* sit : situations) {
        for (std::size_t i = 0; i < sit->samples.size(); i += start_stride) {
            if (!sit->relative_position(i, cfg.horizon)) {
                ++out.skipped;
                continue;
            }
            const auto si = static_cast<std::uint32_t>(out.starts.size());
            out.starts.push_back(make_start(*sit, i));
            for (double t : grid) {
                const auto pos = *sit->relative_position(i, t);
                out.rows.push_back({si, t, pos.x, pos.y, 0.0, 0.0});
            }
        }
    }
    return out;
}

void broadcast_probabilities(ExplodedSet& set) {
    for (auto& r : set.rows) {
        r.p_lcl = set.starts[r.start].p_lcl;
        r.p_lcr = set.starts[r.start].p_lcr;
    }
}

double mirror_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0, 1]: " + format_double(p));
    return p < 0.5 ? -p : 2.0 - p;
}

std::vector<ExplodedRow> mirror_probabilities(const std::vector<ExplodedRow>& rows) {
    std::vector<ExplodedRow> out;
    out.reserve(2 * rows.size());
    for (const auto& r : rows) {
        ExplodedRow m = r;
        m.p_lcl = mirror_probability(r.p_lcl);
        m.p_lcr = mirror_probability(r.p_lcr);
        out.push_back(r);
        out.push_back(m);
    }
    return out;
}

std::array<std::vector<std::uint32_t>, 3> expert_starts(const ExplodedSet& set, std::uint64_t seed) {
    std::array<std::vector<std::uint32_t>, 3> by;
    for (std::size_t i = 0; i < set.starts.size(); ++i)
        by[index_of(set.starts[i].label)].push_back(static_cast<std::uint32_t>(i));
    auto& flw = by[index_of(Maneuver::FLW)];
    const std::size_t target = (by[index_of(Maneuver::LCL)].size() + by[index_of(Maneuver::LCR)].size() + 1) / 2;
    if (flw.size() > target) {
        Rng rng(seed);
        rng.shuffle(flw);
        flw.resize(target);
        std::sort(flw.begin(), flw.end());
    }
    return by;
}

void save_exploded(const ExplodedSet& set, const Catalog& catalog, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string out = "start,situation_id,t_rec,label,P_LCL,P_LCR";
    for (const auto& f : catalog.features()) out += "," + f.id;
    out += '\n';
    for (std::size_t i = 0; i < set.starts.size(); ++i) {
        const auto& s = set.starts[i];
        out += std::to_string(i) + ',' + std::to_string(s.situation_id) + ',';
        append_double(out, s.t_rec);
        out += ',';
        out += to_string(s.label);
        out += ',';
        append_double(out, s.p_lcl);
        out += ',';
        append_double(out, s.p_lcr);
        for (double v : s.features) {
            out += ',';
            append_double(out, v);
        }
        out += '\n';
    }
    std::ofstream(dir / "starts.csv", std::ios::binary) << out;

    out = "start,t,x,y,P_LCL,P_LCR\n";
    for (const auto& r : set.rows) {
        out += std::to_string(r.start);
        for (double v : {r.t, r.x, r.y, r.p_lcl, r.p_lcr}) {
            out += ',';
            append_double(out, v);
        }
        out += '\n';
    }
    std::ofstream rows(dir / "rows.csv", std::ios::binary);
    rows << out;
    if (!rows) throw Error("cannot write " + (dir / "rows.csv").string());
}

}  // namespace bpred::prep
