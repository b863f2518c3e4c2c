#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fel/measure.hpp"

namespace fel {

struct MomentEstimate {
  int k = 0;
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
  int matrix_dim = 0;
};

/// Diagonal of a dim x dim matrix whose spectral law approximates mu: atoms
/// get multiplicities proportional to their masses, densities contribute the
/// quantiles at (i + 1/2)/dim.
std::vector<double> diagonal_realization(const Measure& mu, int dim);

/// Monte Carlo moments (1/dim) Tr M^k, k = 1..max_order, of
/// M = sum a_i U_i D_i U_i^* with independent Haar unitaries U_i.
/// Trial t draws from mt19937_64 seeded with splitmix64(seed + splitmix64(t)).
std::vector<MomentEstimate> sample_free_sum_moments(std::span<const Measure> specs, std::span<const double> a,
                                                    int dim, int trials, int max_order, std::uint64_t seed);

}  // namespace fel
