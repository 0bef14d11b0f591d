#include <ostream>

#include "bpred/core/dataset_io.hpp"
#include "internal.hpp"
#include "verbs.hpp"

namespace bpred::pipeline::verbs {

using namespace detail;

void sim(const Settings& s, std::ostream& out) {
    const Dataset ds = sim::generate_dataset(s.sim);
    save_dataset(ds, s.paths.sim());
    out << "sim: " << ds.situations.size() << " situations, " << ds.sample_count() << " samples, "
        << ds.catalog.size() << " features -> " << s.paths.sim().string() << '\n';
}

void label(const Settings& s, std::ostream& out) {
    require_file(s.paths.sim() / "dataset.csv", "sim");
    Dataset ds = load_dataset(s.paths.sim());
    prep::label_dataset(ds, s.horizon.horizon);
    std::array<std::size_t, 3> n{};
    for (const auto& sit : ds.situations)
        for (const auto& smp : sit.samples) ++n[index_of(smp.label)];
    save_dataset(ds, s.paths.labeled());
    out << "label: " << ds.sample_count() << " samples in, LCL=" << n[0] << " FLW=" << n[1] << " LCR=" << n[2]
        << " -> " << s.paths.labeled().string() << '\n';
}

void split(const Settings& s, std::ostream& out) {
    const Dataset ds = load_labeled(s);
    const auto part = prep::partition_dataset(ds, s.split.maneuver_fraction, s.split.position_test_fraction, s.split.seed);
    const auto folds = prep::split_folds(ds, part.maneuver, s.split.folds, s.horizon.horizon, mix_seed(s.split.seed, 1));
    for (std::size_t f = 0; f < folds.folds.size(); ++f)
        if (folds.folds[f].empty())
            throw DomainError("fold " + std::to_string(f + 1) +
                              " has no balanced samples; increase sim.n_situations or lower split.folds");
    write_json(s.paths.split(), split_to_json(ds, part, folds));
    std::size_t rows = 0;
    for (const auto& f : folds.folds) rows += f.size();
    out << "split: " << ds.situations.size() << " situations -> maneuver " << part.maneuver.size() << ", position train "
        << part.position_train.size() << ", position test " << part.position_test.size() << "; " << folds.folds.size()
        << " balanced folds, " << rows << " rows\n";
}

}  // namespace bpred::pipeline::verbs
