#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dve/actors/galton.hpp"

namespace dve {

/// PMF of Binomial(n, p) as a vector of n + 1 probabilities.
std::vector<double> binomial_pmf(int n, double p);

struct ExpectedDistribution {
  std::vector<double> expected;             // combined floor, one entry per bucket
  std::vector<std::vector<double>> per_row;  // N_row * Binomial(n, 1/2), length n + 1
  std::vector<int> row_offsets;
  double total() const;
};

ExpectedDistribution theoretical_distribution(const GaltonGeometry& geom);

struct BucketHistogram {
  std::vector<std::int64_t> counts;

  BucketHistogram() = default;
  explicit BucketHistogram(std::size_t buckets) : counts(buckets, 0) {}
  std::int64_t total() const;
  std::vector<double> as_doubles() const { return {counts.begin(), counts.end()}; }
};

/// Root mean square difference over buckets, on raw counts.
double rmse(std::span<const double> observed, std::span<const double> baseline);
double rmse(const BucketHistogram& observed, std::span<const double> baseline);

}  // namespace dve
