#pragma once

// Seeded multivariate hypergeometric sampling of ideal aggregates.
//
// A multivariate draw is built by sequential conditioning: the count of class 1
// is a univariate hypergeometric draw, class 2 is drawn from what remains, and
// so on; the last class takes the rest. Each univariate draw inverts the exact
// pmf by a chop-down search that starts at the mode and alternates outward, so
// its expected cost is O(standard deviation) for any population size.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geoscore/geometry.hpp"
#include "geoscore/philox.hpp"
#include "geoscore/population.hpp"

namespace geoscore {

struct SamplerSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t replicate_index = 0;
};

struct IdealAggregate {
    ClassCount class_counts;                       ///< pooled over strata
    std::map<std::string, ClassCount> per_stratum;
};

/// ln(k!) for k = 0..max_n.
class LogFactorialTable {
  public:
    explicit LogFactorialTable(std::int64_t max_n);
    double operator()(std::int64_t k) const { return table_[static_cast<std::size_t>(k)]; }
    std::int64_t max_n() const noexcept { return static_cast<std::int64_t>(table_.size()) - 1; }

  private:
    std::vector<double> table_;
};

/// Number of successes when drawing `draws` items without replacement from
/// `good` successes and `bad` failures.
std::int64_t draw_hypergeometric(std::int64_t good, std::int64_t bad, std::int64_t draws,
                                 PhiloxStream& rng, const LogFactorialTable& log_fact);

/// Multivariate draw of `draws` items from `population` written into `out`.
void draw_multivariate(std::span<const std::int64_t> population, std::int64_t draws,
                       PhiloxStream& rng, const LogFactorialTable& log_fact,
                       std::span<std::int64_t> out);

/// One stratum's draw. `stratum_index` selects the substream (the stratum's
/// position in its AreaPopulation when called through draw_ideal).
ClassCount draw_stratum(const StratumPopulation& pop, std::int64_t demand, SamplerSeed seed,
                        std::uint32_t stratum_index = 0);

/// Precomputed per-profile sampling state; cheap to share across threads.
class SamplingPlan {
  public:
    SamplingPlan(const AggregateProfile& profile, const AreaPopulation& pop);

    std::size_t classes() const noexcept { return classes_; }
    std::int64_t total_demand() const noexcept { return total_demand_; }

    /// Pooled class counts of one replicate, accumulated into `pooled` (zeroed first).
    void draw_pooled(SamplerSeed seed, std::span<std::int64_t> pooled) const;
    IdealAggregate draw(SamplerSeed seed) const;

  private:
    struct Entry {
        std::string stratum_id;
        std::uint32_t index;
        std::vector<std::int64_t> counts;
        std::int64_t demand;
    };

    std::size_t classes_;
    std::int64_t total_demand_ = 0;
    std::vector<Entry> entries_;
    LogFactorialTable log_fact_;
};

IdealAggregate draw_ideal(const AggregateProfile& profile, const AreaPopulation& pop,
                          SamplerSeed seed);

}  // namespace geoscore
