#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace rankforge {

enum class Aggregation { kSum, kMax, kMin };

Aggregation ParseAggregation(std::string_view tag);
std::string_view AggregationName(Aggregation method);

struct MuSigma {
  double mu = 0.0;
  double sigma = 0.0;
};

/// Team skill from member skills: sum, best member, or weakest member.
/// Throws InvalidArgument on an empty team.
double AggregateMu(Aggregation method, std::span<const double> member_mus);

/// Team deviation: the sum of member deviations under SUM, otherwise the
/// deviation of the member that AggregateMu selects (first on ties).
double AggregateSigma(Aggregation method, std::span<const MuSigma> members);

/// Index of the member whose mu represents the team under MAX/MIN.
std::size_t SelectedMember(Aggregation method, std::span<const double> member_mus);

struct Weights {
  std::vector<double> values;
  bool fallback = false;  // uniform weights were used
};

/// Share of each member in the team total: value_i / sum(values).
/// Falls back to uniform 1/n when any value is non-positive.
Weights ContributionWeights(std::span<const double> values);

}  // namespace rankforge
