#pragma once

#include <vector>

namespace bpred {

/// Fractional ranks starting at 1; tied values share their average rank.
std::vector<double> average_ranks(const std::vector<double>& v);

/// Pearson correlation. Throws DomainError for length mismatch, fewer than two
/// values, or a constant input.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bpred
