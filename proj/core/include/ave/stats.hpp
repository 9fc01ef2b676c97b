#pragma once

#include <span>
#include <vector>

namespace ave::stats {

double mean(std::span<const double> xs);
/// Unbiased (n - 1) sample variance; 0 for fewer than two samples.
double variance(std::span<const double> xs);
/// Ranks starting at 1; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> xs);
double pearson(std::span<const double> xs, std::span<const double> ys);
/// Pearson correlation of the average ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

}  // namespace ave::stats
