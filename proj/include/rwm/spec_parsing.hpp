#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rwm/asymptotics.hpp"
#include "rwm/elliptical.hpp"
#include "rwm/target_models.hpp"

namespace rwm {

/// gaussian | exponential | laplace | radial-gaussian | radial-exponential |
/// lognormal | mixture:p=<x>|1/d|1/d^2|1/d^3 | custom:<path>
TargetFamily parse_target_spec(std::string_view spec);

/// point:<c> | halfnormal | exp | lognormal | atoms:<v>/<w>,... |
/// samples:<path> | from-target:<target-spec>:<d>
MixingDistribution parse_mixing_spec(std::string_view spec, std::uint64_t seed = 1,
                                     std::size_t from_target_samples = 100000);

/// const:<c> | iota | spike:<c> | spike:d | file:<path>
EigenRule parse_eigen_rule(std::string_view spec);

/// Comma-separated items, each an integer or a:b:linN / a:b:logN.
/// Result is sorted and deduplicated.
std::vector<int> parse_dims(std::string_view spec);

/// Whitespace-separated positive reals with # comments.
std::vector<double> read_numbers(const std::string& path);

}  // namespace rwm
