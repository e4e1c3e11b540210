#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "geoscore/geometry.hpp"
#include "geoscore/population.hpp"

namespace geoscore {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::int64_t kDefaultReplicates = 200000;
inline constexpr double kDefaultEpsilon = 0.005;

/// Smallest N >= 1 with exp(-2 N epsilon^2) <= tail_bound.
std::int64_t hoeffding_replicates(double epsilon, double tail_bound);
/// exp(-2 N epsilon^2): bound on P(estimate - score >= epsilon) after N replicates.
double hoeffding_bound(std::int64_t replicates, double epsilon);
/// Epsilon achieved by N replicates at the given tail bound.
double hoeffding_half_width(std::int64_t replicates, double tail_bound);

/// True when an ideal aggregate with numerator `candidate` (T * delta) performs
/// strictly worse than the reference. Differences within 1e-12 * sum(a) * T are ties.
bool strictly_worse(double candidate, double reference, const EffortWeights& w,
                    std::int64_t total);

struct ScoreEstimate {
    std::string aggregate_id;
    double delta_value = 0.0;
    double geo_score = 0.0;            ///< worse_count / replicates
    std::int64_t worse_count = 0;
    std::int64_t replicates = 0;
    std::uint64_t master_seed = 0;
    std::string weights_preset;
};

struct ScoreOptions {
    std::int64_t replicates = kDefaultReplicates;
    std::uint64_t master_seed = 0;
    unsigned threads = 1;
};

/// Monte-Carlo estimate of the probability that an ideal aggregate with the same
/// per-stratum demand has strictly larger delta than the observed outcome.
/// The result depends only on the inputs and the seed, never on `threads`.
ScoreEstimate geometric_score(const AggregateProfile& profile, const AreaPopulation& pop,
                              const EffortWeights& w, const ScoreOptions& options);

struct ExactScore {
    Rational value;
    std::uint64_t configurations = 0;  ///< pooled outcome vectors enumerated
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Exact geometric score by enumerating every class-count configuration of every
/// demanded stratum, weighting by hypergeometric multiplicities and convolving across
/// strata. Throws EnumerationCapExceeded when the product of per-stratum
/// configuration counts exceeds `cap`.
ExactScore exact_geometric_score(const AggregateProfile& profile, const AreaPopulation& pop,
                                 const EffortWeights& w,
                                 std::uint64_t cap = kDefaultEnumerationCap);

enum class RDenominator {
    stratum_weighted,  ///< demand-weighted mean of the strata the aggregate draws from
    area,              ///< mean over every product of the area
};

/// Mean class score of the observed products over the population mean.
double r_score(const AggregateProfile& profile, const AreaPopulation& pop,
               const ClassScoreScale& scale,
               RDenominator denominator = RDenominator::stratum_weighted);

struct RankRow {
    std::string aggregate_id;
    double r = 0.0;
    int r_rank = 0;
    double geo_score = 0.0;
    int geo_rank = 0;
    double delta_value = 0.0;
};

struct RankTable {
    std::vector<RankRow> rows;  ///< ordered by r_rank, input order within ties
};

/// 1-based competition ranks (ties share the minimum rank: 1, 1, 3), descending.
std::vector<int> competition_ranks(const std::vector<double>& values);

RankTable rank(const std::vector<ScoreEstimate>& estimates, const std::vector<double>& r_scores);

}  // namespace geoscore
