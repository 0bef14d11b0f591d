#pragma once

// Helpers shared by the verb implementations.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpred/eval/metrics.hpp"
#include "bpred/core/rng.hpp"
#include "bpred/featsel/featsel.hpp"
#include "bpred/learn/classifier.hpp"
#include "bpred/pipeline/pipeline.hpp"
#include "bpred/prep/prep.hpp"

namespace bpred::pipeline::detail {

void require_file(const std::filesystem::path& p, const std::string& produced_by);
void ensure_dir(const std::filesystem::path& p);
nlohmann::json read_json(const std::filesystem::path& p);
void write_json(const std::filesystem::path& p, const nlohmann::json& j);

/// Labeled dataset written by the label verb.
Dataset load_labeled(const Settings& s);

struct SplitData {
    prep::Partition partition;
    prep::FoldAssignment folds;
};
nlohmann::json split_to_json(const Dataset& ds, const prep::Partition& p, const prep::FoldAssignment& f);
SplitData load_split(const Settings& s, const Dataset& ds);

/// Rows of the referenced samples restricted to catalog columns `cols`.
learn::LabeledData design(const Dataset& ds, const std::vector<prep::SampleRef>& refs,
                          const std::vector<std::size_t>& cols);
std::vector<std::size_t> all_columns(const Catalog& c);

/// Feature set file of a variant; D is stored per wrapper algorithm.
std::filesystem::path feature_file(const Settings& s, char variant, learn::Algo algo);
featsel::FeatureSet load_feature_set(const Settings& s, char variant, learn::Algo algo);

std::filesystem::path classifier_file(const Settings& s, const std::string& algo);
learn::ClassifierModel load_classifier(const Settings& s, const std::string& algo);

/// n x p matrix of start features in the classifier's column order.
learn::RowMatrix start_matrix(const std::vector<prep::TrajectoryStart>& starts, const Catalog& catalog,
                              const std::vector<std::string>& ids);

/// Sorted random subset of 0..n-1 of at most `k` indices.
std::vector<std::size_t> pick_rows(std::size_t n, std::size_t k, std::uint64_t seed);

nlohmann::json error_table_to_json(const eval::ErrorTable& t);
eval::ErrorTable error_table_from_json(const nlohmann::json& j);

std::string fixed(double v, int digits = 3);

}  // namespace bpred::pipeline::detail
