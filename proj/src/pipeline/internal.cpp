#include "internal.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "bpred/core/dataset_io.hpp"
#include "bpred/core/rng.hpp"

namespace bpred::pipeline::detail {

namespace fs = std::filesystem;

void require_file(const fs::path& p, const std::string& produced_by) {
    if (!fs::exists(p)) throw DomainError("missing input " + p.string() + " (run '" + produced_by + "' first)");
}

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw Error("cannot create directory " + p.string() + ": " + ec.message());
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(p.string(), 0, e.what());
    }
}

void write_json(const fs::path& p, const nlohmann::json& j) {
    ensure_dir(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << j.dump(1) << '\n';
    out.close();
    if (!out) throw Error("error while writing " + p.string());
}

Dataset load_labeled(const Settings& s) {
    require_file(s.paths.labeled() / "dataset.csv", "label");
    return load_dataset(s.paths.labeled());
}

nlohmann::json split_to_json(const Dataset& ds, const prep::Partition& p, const prep::FoldAssignment& f) {
    nlohmann::json j;
    j["maneuver"] = p.maneuver;
    j["position_train"] = p.position_train;
    j["position_test"] = p.position_test;
    nlohmann::json fold_of = nlohmann::json::array();
    for (const auto& [id, k] : f.fold_of) fold_of.push_back({id, k});
    j["fold_of"] = fold_of;
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& fold : f.folds) {
        nlohmann::json refs = nlohmann::json::array();
        for (const auto& r : fold) refs.push_back({ds.situations[r.situation].situation_id, r.sample});
        folds.push_back(refs);
    }
    j["folds"] = folds;
    j["raw_counts"] = f.raw_counts;
    return j;
}

SplitData load_split(const Settings& s, const Dataset& ds) {
    require_file(s.paths.split(), "split");
    const auto j = read_json(s.paths.split());
    std::unordered_map<std::int64_t, std::uint32_t> index;
    for (std::size_t i = 0; i < ds.situations.size(); ++i)
        index.emplace(ds.situations[i].situation_id, static_cast<std::uint32_t>(i));
    SplitData d;
    try {
        d.partition.maneuver = j.at("maneuver").get<std::vector<std::int64_t>>();
        d.partition.position_train = j.at("position_train").get<std::vector<std::int64_t>>();
        d.partition.position_test = j.at("position_test").get<std::vector<std::int64_t>>();
        for (const auto& e : j.at("fold_of")) d.folds.fold_of[e.at(0).get<std::int64_t>()] = e.at(1).get<int>();
        for (const auto& fold : j.at("folds")) {
            std::vector<prep::SampleRef> refs;
            for (const auto& r : fold) {
                const auto it = index.find(r.at(0).get<std::int64_t>());
                if (it == index.end()) throw DomainError("split refers to an unknown situation; rerun 'split'");
                const auto sample = r.at(1).get<std::uint32_t>();
                if (sample >= ds.situations[it->second].samples.size())
                    throw DomainError("split refers to a missing sample; rerun 'split'");
                refs.push_back({it->second, sample});
            }
            d.folds.folds.push_back(std::move(refs));
        }
        d.folds.raw_counts = j.at("raw_counts").get<std::vector<std::array<std::size_t, 3>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(s.paths.split().string(), 0, e.what());
    }
    if (d.folds.folds.size() < 3) throw DomainError("split needs at least three folds");
    return d;
}

learn::LabeledData design(const Dataset& ds, const std::vector<prep::SampleRef>& refs,
                          const std::vector<std::size_t>& cols) {
    learn::LabeledData d;
    d.x.resize(static_cast<Eigen::Index>(refs.size()), static_cast<Eigen::Index>(cols.size()));
    d.y.resize(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto& smp = ds.situations[refs[i].situation].samples[refs[i].sample];
        for (std::size_t c = 0; c < cols.size(); ++c)
            d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = smp.features[cols[c]];
        d.y[i] = static_cast<int>(index_of(smp.label));
    }
    return d;
}

std::vector<std::size_t> all_columns(const Catalog& c) {
    std::vector<std::size_t> cols(c.size());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    return cols;
}

fs::path feature_file(const Settings& s, char variant, learn::Algo algo) {
    if (variant == 'D') return s.paths.features() / ("D_" + learn::to_string(algo) + ".json");
    return s.paths.features() / (std::string(1, variant) + ".json");
}

featsel::FeatureSet load_feature_set(const Settings& s, char variant, learn::Algo algo) {
    const auto p = feature_file(s, variant, algo);
    require_file(p, "select");
    return featsel::feature_set_from_json(read_json(p));
}

fs::path classifier_file(const Settings& s, const std::string& algo) {
    return s.paths.models() / ("clf_" + algo + ".json");
}

learn::ClassifierModel load_classifier(const Settings& s, const std::string& algo) {
    const auto p = classifier_file(s, algo);
    require_file(p, "train-clf");
    return learn::classifier_from_json(read_json(p));
}

learn::RowMatrix start_matrix(const std::vector<prep::TrajectoryStart>& starts, const Catalog& catalog,
                              const std::vector<std::string>& ids) {
    const auto cols = catalog.indices(ids);
    learn::RowMatrix x(static_cast<Eigen::Index>(starts.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < starts.size(); ++i)
        for (std::size_t c = 0; c < cols.size(); ++c)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = starts[i].features[cols[c]];
    return x;
}

std::vector<std::size_t> pick_rows(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (k == 0 || n <= k) return idx;
    // partial Fisher-Yates
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

nlohmann::json stats_json(const std::vector<eval::ErrorStats>& v) {
    auto a = nlohmann::json::array();
    for (const auto& e : v) a.push_back({e.n, e.median, e.q1, e.q3, e.p05, e.p95});
    return a;
}

std::vector<eval::ErrorStats> stats_from(const nlohmann::json& a) {
    std::vector<eval::ErrorStats> v;
    for (const auto& e : a)
        v.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>(), e.at(2).get<double>(), e.at(3).get<double>(),
                     e.at(4).get<double>(), e.at(5).get<double>()});
    return v;
}

}  // namespace

nlohmann::json error_table_to_json(const eval::ErrorTable& t) {
    nlohmann::json j;
    j["times"] = t.times;
    j["x"] = stats_json(t.x);
    j["y"] = stats_json(t.y);
    j["x_by_class"] = nlohmann::json::array();
    j["y_by_class"] = nlohmann::json::array();
    for (std::size_t m = 0; m < 3; ++m) {
        j["x_by_class"].push_back(stats_json(t.x_by_class[m]));
        j["y_by_class"].push_back(stats_json(t.y_by_class[m]));
    }
    return j;
}

eval::ErrorTable error_table_from_json(const nlohmann::json& j) {
    eval::ErrorTable t;
    t.times = j.at("times").get<std::vector<double>>();
    t.x = stats_from(j.at("x"));
    t.y = stats_from(j.at("y"));
    for (std::size_t m = 0; m < 3; ++m) {
        t.x_by_class[m] = stats_from(j.at("x_by_class").at(m));
        t.y_by_class[m] = stats_from(j.at("y_by_class").at(m));
    }
    return t;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace bpred::pipeline::detail
