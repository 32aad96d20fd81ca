#pragma once

#include <span>
#include <vector>

namespace pdm::stats {

double mean(std::span<const double> x);

// Population variance (divisor n).
double variance(std::span<const double> x);

// Pearson correlation; 0 when either side is constant.
double pearson(std::span<const double> x, std::span<const double> y);

// Ranks 1..n, ties get the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

double spearman(std::span<const double> x, std::span<const double> y);

} // namespace pdm::stats
