#include "rankforge/aggregation.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "rankforge/core.hpp"

namespace rankforge {

Aggregation ParseAggregation(std::string_view tag) {
  if (tag == "sum") return Aggregation::kSum;
  if (tag == "max") return Aggregation::kMax;
  if (tag == "min") return Aggregation::kMin;
  throw ConfigError(fmt::format("unknown aggregation method '{}'", tag));
}

std::string_view AggregationName(Aggregation method) {
  switch (method) {
    case Aggregation::kSum:
      return "sum";
    case Aggregation::kMax:
      return "max";
    case Aggregation::kMin:
      return "min";
  }
  return "unknown";
}

std::size_t SelectedMember(Aggregation method, std::span<const double> member_mus) {
  if (member_mus.empty()) throw InvalidArgument("empty team");
  // max_element/min_element return the first extreme element.
  if (method == Aggregation::kMin) {
    return std::min_element(member_mus.begin(), member_mus.end()) - member_mus.begin();
  }
  return std::max_element(member_mus.begin(), member_mus.end()) - member_mus.begin();
}

double AggregateMu(Aggregation method, std::span<const double> member_mus) {
  if (member_mus.empty()) throw InvalidArgument("empty team");
  if (method == Aggregation::kSum) {
    return std::accumulate(member_mus.begin(), member_mus.end(), 0.0);
  }
  return member_mus[SelectedMember(method, member_mus)];
}

double AggregateSigma(Aggregation method, std::span<const MuSigma> members) {
  if (members.empty()) throw InvalidArgument("empty team");
  for (const MuSigma& m : members) {
    if (!(m.sigma > 0.0)) throw InvalidArgument("member deviation must be positive");
  }
  if (method == Aggregation::kSum) {
    double total = 0.0;
    for (const MuSigma& m : members) total += m.sigma;
    return total;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    const bool better = method == Aggregation::kMax ? members[i].mu > members[best].mu
                                                    : members[i].mu < members[best].mu;
    if (better) best = i;
  }
  return members[best].sigma;
}

Weights ContributionWeights(std::span<const double> values) {
  Weights w;
  if (values.empty()) return w;
  const bool positive = std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  if (!positive || !(total > 0.0)) {
    w.values.assign(values.size(), 1.0 / static_cast<double>(values.size()));
    w.fallback = true;
    return w;
  }
  w.values.reserve(values.size());
  for (double v : values) w.values.push_back(v / total);
  return w;
}

}  // namespace rankforge
