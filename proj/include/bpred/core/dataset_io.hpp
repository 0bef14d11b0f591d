#pragma once

#include <filesystem>

#include "bpred/core/types.hpp"

namespace bpred {

/// Writes `dir`/dataset.csv, `dir`/futures.csv and `dir`/catalog.json.
///
/// dataset.csv has one row per sample:
///   situation_id,t_rec,lane_width,marking_left,marking_right,ttlcl,ttlcr,label,<feature ids...>
/// futures.csv holds the road-frame track keyed by (situation_id, t_rec):
///   situation_id,t_rec,x,y
/// Relative futures of any sample are derived from that track. Numbers use the
/// shortest round-trip decimal form, so load_dataset(save_dataset(d)) == d.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Inverse of save_dataset. Throws ParseError with a line number on malformed
/// input (bad header, unknown feature id, non-numeric or NaN cell).
Dataset load_dataset(const std::filesystem::path& dir);

void save_catalog(const Catalog& catalog, const std::filesystem::path& file);
Catalog load_catalog(const std::filesystem::path& file);

}  // namespace bpred
