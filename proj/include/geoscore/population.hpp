#pragma once

// Stratified product populations, aggregate composition profiles and their
// observed outcomes, plus the CSV formats they are exchanged in:
//
//   population.csv  area,stratum,expected_total,count_<class>...   (>= 2 classes)
//   profiles.csv    aggregate,stratum,demand                       (long format)
//   outcomes.csv    aggregate,count_<class>...

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoscore/geometry.hpp"

namespace geoscore {

struct StratumPopulation {
    std::string stratum_id;
    ClassCount class_counts;
    /// Total as printed in the source table. Equal to class_counts.total() for
    /// consistent data; loaders only keep mismatches under TotalsPolicy::counts.
    std::int64_t expected_total = 0;

    /// Number of products available for sampling (the class counts are authoritative).
    std::int64_t size() const noexcept { return class_counts.total(); }
    bool consistent() const noexcept { return class_counts.total() == expected_total; }
};

class AreaPopulation {
  public:
    AreaPopulation(std::string area_id, std::vector<std::string> class_labels,
                   std::vector<StratumPopulation> strata);

    const std::string& area_id() const noexcept { return area_id_; }
    const std::vector<std::string>& class_labels() const noexcept { return class_labels_; }
    std::size_t classes() const noexcept { return class_labels_.size(); }
    const std::vector<StratumPopulation>& strata() const noexcept { return strata_; }

    const StratumPopulation* find(std::string_view stratum_id) const;
    /// Position of a stratum; used as the stratum index in random substream keys.
    std::optional<std::size_t> index_of(std::string_view stratum_id) const;
    /// Class counts pooled over every stratum.
    ClassCount pooled_counts() const;

  private:
    std::string area_id_;
    std::vector<std::string> class_labels_;
    std::vector<StratumPopulation> strata_;
};

struct AggregateProfile {
    std::string aggregate_id;
    /// stratum_id -> number of expected products.
    std::map<std::string, std::int64_t> demand;
    std::optional<ClassCount> observed;

    std::int64_t total_demand() const;
};

/// Per-class scores used by the R score, best-first and strictly decreasing in [0, 1].
class ClassScoreScale {
  public:
    explicit ClassScoreScale(std::vector<double> scores);
    /// Excellent 1, Good 0.7, Fair 0.4, Acceptable 0.1, Limited 0.
    static ClassScoreScale vqr();

    std::span<const double> scores() const noexcept { return scores_; }
    std::size_t classes() const noexcept { return scores_.size(); }
    /// Mean score of the products described by `counts`.
    double mean(const ClassCount& counts) const;

  private:
    std::vector<double> scores_;
};

enum class TotalsPolicy {
    strict,  ///< a row whose counts do not sum to expected_total is an IntegrityError
    counts,  ///< such rows load and are reported; class counts define the stratum
};

struct IntegrityIssue {
    std::string source;
    std::size_t line = 0;
    std::string stratum_id;
    std::int64_t expected_total = 0;
    std::int64_t counted_total = 0;

    std::string describe() const;
};

struct PopulationLoad {
    AreaPopulation population;
    std::vector<IntegrityIssue> issues;
};

/// Parses and audits a population table. Syntax errors throw ParseError; duplicate
/// strata, mixed areas and empty input throw IntegrityError. Row-sum mismatches are
/// collected in `issues` and, under TotalsPolicy::strict, raised as one IntegrityError.
PopulationLoad read_population(std::istream& in, std::string_view source,
                               TotalsPolicy policy = TotalsPolicy::strict);

/// Strict load: any integrity issue throws.
AreaPopulation load_population(std::istream& in, std::string_view source);
AreaPopulation load_population_file(const std::string& path,
                                    TotalsPolicy policy = TotalsPolicy::strict);

void write_population(std::ostream& out, const AreaPopulation& pop);

/// Profiles in first-appearance order, validated against `pop`.
std::vector<AggregateProfile> load_profiles(std::istream& in, std::string_view source,
                                            const AreaPopulation& pop);
std::vector<AggregateProfile> load_profiles_file(const std::string& path,
                                                 const AreaPopulation& pop);

struct OutcomeRow {
    std::string aggregate_id;
    ClassCount counts;
    std::size_t line = 0;
};

struct OutcomeTable {
    std::string source;
    std::vector<std::string> class_labels;
    std::vector<OutcomeRow> rows;  ///< file order, aggregate ids unique
};

OutcomeTable load_outcomes(std::istream& in, std::string_view source);
OutcomeTable load_outcomes_file(const std::string& path);

/// Attaches observed outcomes to matching profiles. Every outcome row must name a
/// known aggregate, have the population's number of classes, and sum to that
/// aggregate's total demand.
void attach_outcomes(const OutcomeTable& outcomes, const AreaPopulation& pop,
                     std::vector<AggregateProfile>& profiles);

void write_profiles(std::ostream& out, const std::vector<AggregateProfile>& profiles);

/// Throws IntegrityError unless every demanded stratum exists in `pop`, no demand
/// exceeds its stratum size, and any observed counts sum to the total demand.
void validate_profile(const AggregateProfile& profile, const AreaPopulation& pop);

/// Observed outcome as frequencies. Throws ValidationError if no outcome is attached.
AssessmentPoint observed_point(const AggregateProfile& profile);

}  // namespace geoscore
