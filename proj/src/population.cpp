#include "geoscore/population.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "csv.hpp"
#include "geoscore/error.hpp"

namespace geoscore {

namespace {

constexpr std::string_view kCountPrefix = "count_";

void expect_column(const std::string& source, const csv::Row& header, std::size_t i,
                   std::string_view name) {
    if (i >= header.fields.size() || header.fields[i].text != name) {
        csv::fail(source, header, i,
                  "expected header column " + std::to_string(i + 1) + " to be '" +
                      std::string(name) + "'");
    }
}

// Class labels from trailing count_<label> header columns starting at `first`.
std::vector<std::string> class_labels(const std::string& source, const csv::Row& header,
                                      std::size_t first) {
    std::vector<std::string> labels;
    for (std::size_t i = first; i < header.fields.size(); ++i) {
        const std::string& name = header.fields[i].text;
        if (!name.starts_with(kCountPrefix) || name.size() == kCountPrefix.size()) {
            csv::fail(source, header, i, "expected a count_<class> column, got '" + name + "'");
        }
        labels.push_back(name.substr(kCountPrefix.size()));
    }
    if (labels.size() < 2) csv::fail(source, header, first, "need at least 2 class columns");
    return labels;
}

void require_width(const std::string& source, const csv::Row& row, std::size_t width) {
    if (row.fields.size() != width) {
        csv::fail(source, row, std::min(row.fields.size(), width),
                  "expected " + std::to_string(width) + " fields, got " +
                      std::to_string(row.fields.size()));
    }
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return in;
}

}  // namespace

AreaPopulation::AreaPopulation(std::string area_id, std::vector<std::string> class_labels,
                               std::vector<StratumPopulation> strata)
    : area_id_(std::move(area_id)),
      class_labels_(std::move(class_labels)),
      strata_(std::move(strata)) {
    if (strata_.empty()) throw IntegrityError("no strata");
    if (class_labels_.size() < 2) throw ValidationError("a population needs at least 2 classes");
    std::set<std::string_view> seen;
    for (const auto& s : strata_) {
        if (!seen.insert(s.stratum_id).second) {
            throw IntegrityError("duplicate stratum '" + s.stratum_id + "'");
        }
        if (s.class_counts.classes() != class_labels_.size()) {
            throw ContractViolation("stratum '" + s.stratum_id + "' has " +
                                    std::to_string(s.class_counts.classes()) +
                                    " classes, area has " +
                                    std::to_string(class_labels_.size()));
        }
        if (s.size() <= 0) throw IntegrityError("stratum '" + s.stratum_id + "' is empty");
    }
}

const StratumPopulation* AreaPopulation::find(std::string_view stratum_id) const {
    const auto idx = index_of(stratum_id);
    return idx ? &strata_[*idx] : nullptr;
}

std::optional<std::size_t> AreaPopulation::index_of(std::string_view stratum_id) const {
    for (std::size_t i = 0; i < strata_.size(); ++i) {
        if (strata_[i].stratum_id == stratum_id) return i;
    }
    return std::nullopt;
}

ClassCount AreaPopulation::pooled_counts() const {
    auto pooled = ClassCount::zeros(classes());
    for (const auto& s : strata_) pooled += s.class_counts;
    return pooled;
}

std::int64_t AggregateProfile::total_demand() const {
    std::int64_t total = 0;
    for (const auto& [_, d] : demand) total += d;
    return total;
}

ClassScoreScale::ClassScoreScale(std::vector<double> scores) : scores_(std::move(scores)) {
    if (scores_.size() < 2) throw ValidationError("a score scale needs at least 2 classes");
    for (std::size_t i = 0; i < scores_.size(); ++i) {
        if (!std::isfinite(scores_[i]) || scores_[i] < 0.0 || scores_[i] > 1.0) {
            throw ValidationError("class scores must lie in [0, 1]");
        }
        if (i > 0 && !(scores_[i] < scores_[i - 1])) {
            throw ValidationError("class scores must be strictly decreasing");
        }
    }
}

ClassScoreScale ClassScoreScale::vqr() { return ClassScoreScale({1.0, 0.7, 0.4, 0.1, 0.0}); }

double ClassScoreScale::mean(const ClassCount& counts) const {
    if (counts.classes() != scores_.size()) {
        throw ContractViolation("score scale has " + std::to_string(scores_.size()) +
                                " classes, counts have " + std::to_string(counts.classes()));
    }
    const auto total = counts.total();
    if (total <= 0) throw ValidationError("mean score of an empty count is undefined");
    double sum = 0.0;
    for (std::size_t j = 0; j < scores_.size(); ++j) {
        sum += scores_[j] * static_cast<double>(counts[j]);
    }
    return sum / static_cast<double>(total);
}

std::string IntegrityIssue::describe() const {
    return source + ":" + std::to_string(line) + ": stratum '" + stratum_id +
           "': class counts sum to " + std::to_string(counted_total) +
           " but expected_total is " + std::to_string(expected_total);
}

PopulationLoad read_population(std::istream& in, std::string_view source_view,
                               TotalsPolicy policy) {
    const std::string source(source_view);
    csv::Reader reader(in, source);
    csv::Row header;
    if (!reader.next(header)) throw IntegrityError(source + ": no strata");
    expect_column(source, header, 0, "area");
    expect_column(source, header, 1, "stratum");
    expect_column(source, header, 2, "expected_total");
    auto labels = class_labels(source, header, 3);
    const std::size_t width = 3 + labels.size();

    std::string area_id;
    std::vector<StratumPopulation> strata;
    std::vector<IntegrityIssue> issues;
    std::set<std::string> seen;
    csv::Row row;
    while (reader.next(row)) {
        require_width(source, row, width);
        const std::string& area = row.fields[0].text;
        const std::string& stratum = row.fields[1].text;
        if (area.empty()) csv::fail(source, row, 0, "empty area id");
        if (stratum.empty()) csv::fail(source, row, 1, "empty stratum id");
        if (strata.empty()) {
            area_id = area;
        } else if (area != area_id) {
            throw IntegrityError(source + ":" + std::to_string(row.line) + ": area '" + area +
                                 "' differs from '" + area_id +
                                 "'; one file holds one area");
        }
        if (!seen.insert(stratum).second) {
            throw IntegrityError(source + ":" + std::to_string(row.line) +
                                 ": duplicate stratum '" + stratum + "'");
        }
        const auto expected = csv::parse_count(source, row, 2);
        if (expected <= 0) csv::fail(source, row, 2, "expected_total must be positive");
        std::vector<std::int64_t> counts;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            counts.push_back(csv::parse_count(source, row, 3 + j));
        }
        StratumPopulation s{stratum, ClassCount(std::move(counts)), expected};
        if (!s.consistent()) {
            issues.push_back({source, row.line, stratum, expected, s.class_counts.total()});
        }
        strata.push_back(std::move(s));
    }
    if (strata.empty()) throw IntegrityError(source + ": no strata");

    if (policy == TotalsPolicy::strict && !issues.empty()) {
        std::string msg = "population integrity check failed:";
        for (const auto& issue : issues) msg += "\n  " + issue.describe();
        throw IntegrityError(msg);
    }
    return PopulationLoad{AreaPopulation(area_id, std::move(labels), std::move(strata)),
                          std::move(issues)};
}

AreaPopulation load_population(std::istream& in, std::string_view source) {
    return read_population(in, source, TotalsPolicy::strict).population;
}

AreaPopulation load_population_file(const std::string& path, TotalsPolicy policy) {
    auto in = open(path);
    return read_population(in, path, policy).population;
}

void write_population(std::ostream& out, const AreaPopulation& pop) {
    out << "area,stratum,expected_total";
    for (const auto& label : pop.class_labels()) out << "," << kCountPrefix << label;
    out << "\n";
    for (const auto& s : pop.strata()) {
        out << csv::escape(pop.area_id()) << "," << csv::escape(s.stratum_id) << ","
            << s.expected_total;
        for (auto c : s.class_counts.counts()) out << "," << c;
        out << "\n";
    }
}

void validate_profile(const AggregateProfile& profile, const AreaPopulation& pop) {
    for (const auto& [stratum, demand] : profile.demand) {
        const auto* s = pop.find(stratum);
        if (s == nullptr) {
            throw IntegrityError("aggregate '" + profile.aggregate_id + "': unknown stratum '" +
                                 stratum + "'");
        }
        if (demand < 0) {
            throw IntegrityError("aggregate '" + profile.aggregate_id + "': negative demand");
        }
        if (demand > s->size()) {
            throw IntegrityError("aggregate '" + profile.aggregate_id + "': demand " +
                                 std::to_string(demand) + " in stratum '" + stratum +
                                 "' exceeds its population of " + std::to_string(s->size()));
        }
    }
    if (profile.observed) {
        if (profile.observed->classes() != pop.classes()) {
            throw IntegrityError("aggregate '" + profile.aggregate_id + "': observed outcome has " +
                                 std::to_string(profile.observed->classes()) + " classes, area has " +
                                 std::to_string(pop.classes()));
        }
        if (profile.observed->total() != profile.total_demand()) {
            throw IntegrityError("aggregate '" + profile.aggregate_id + "': observed products (" +
                                 std::to_string(profile.observed->total()) +
                                 ") differ from total demand (" +
                                 std::to_string(profile.total_demand()) + ")");
        }
    }
}

std::vector<AggregateProfile> load_profiles(std::istream& in, std::string_view source_view,
                                            const AreaPopulation& pop) {
    const std::string source(source_view);
    csv::Reader reader(in, source);
    csv::Row header;
    if (!reader.next(header)) throw IntegrityError(source + ": no profiles");
    expect_column(source, header, 0, "aggregate");
    expect_column(source, header, 1, "stratum");
    expect_column(source, header, 2, "demand");
    require_width(source, header, 3);

    std::vector<AggregateProfile> profiles;
    csv::Row row;
    while (reader.next(row)) {
        require_width(source, row, 3);
        const std::string& aggregate = row.fields[0].text;
        const std::string& stratum = row.fields[1].text;
        if (aggregate.empty()) csv::fail(source, row, 0, "empty aggregate id");
        const auto demand = csv::parse_count(source, row, 2);

        const auto* s = pop.find(stratum);
        const std::string where = source + ":" + std::to_string(row.line) + ": ";
        if (s == nullptr) throw IntegrityError(where + "unknown stratum '" + stratum + "'");
        if (demand > s->size()) {
            throw IntegrityError(where + "demand " + std::to_string(demand) + " in stratum '" +
                                 stratum + "' exceeds its population of " +
                                 std::to_string(s->size()));
        }

        auto it = std::find_if(profiles.begin(), profiles.end(),
                               [&](const auto& p) { return p.aggregate_id == aggregate; });
        if (it == profiles.end()) {
            profiles.push_back(AggregateProfile{aggregate, {}, std::nullopt});
            it = std::prev(profiles.end());
        }
        if (!it->demand.emplace(stratum, demand).second) {
            throw IntegrityError(where + "aggregate '" + aggregate + "' lists stratum '" + stratum +
                                 "' twice");
        }
    }
    if (profiles.empty()) throw IntegrityError(source + ": no profiles");
    for (const auto& p : profiles) validate_profile(p, pop);
    return profiles;
}

std::vector<AggregateProfile> load_profiles_file(const std::string& path,
                                                 const AreaPopulation& pop) {
    auto in = open(path);
    return load_profiles(in, path, pop);
}

OutcomeTable load_outcomes(std::istream& in, std::string_view source_view) {
    OutcomeTable table;
    table.source = std::string(source_view);
    const std::string& source = table.source;
    csv::Reader reader(in, source);
    csv::Row header;
    if (!reader.next(header)) throw IntegrityError(source + ": no outcomes");
    expect_column(source, header, 0, "aggregate");
    table.class_labels = class_labels(source, header, 1);
    const std::size_t classes = table.class_labels.size();

    std::set<std::string> seen;
    csv::Row row;
    while (reader.next(row)) {
        require_width(source, row, 1 + classes);
        const std::string& aggregate = row.fields[0].text;
        if (aggregate.empty()) csv::fail(source, row, 0, "empty aggregate id");
        if (!seen.insert(aggregate).second) {
            throw IntegrityError(source + ":" + std::to_string(row.line) +
                                 ": duplicate outcome for aggregate '" + aggregate + "'");
        }
        std::vector<std::int64_t> counts;
        for (std::size_t j = 0; j < classes; ++j) {
            counts.push_back(csv::parse_count(source, row, 1 + j));
        }
        table.rows.push_back(OutcomeRow{aggregate, ClassCount(std::move(counts)), row.line});
    }
    if (table.rows.empty()) throw IntegrityError(source + ": no outcomes");
    return table;
}

OutcomeTable load_outcomes_file(const std::string& path) {
    auto in = open(path);
    return load_outcomes(in, path);
}

void attach_outcomes(const OutcomeTable& outcomes, const AreaPopulation& pop,
                     std::vector<AggregateProfile>& profiles) {
    if (outcomes.class_labels.size() != pop.classes()) {
        throw IntegrityError(outcomes.source + ": outcomes have " +
                             std::to_string(outcomes.class_labels.size()) +
                             " classes, the population has " + std::to_string(pop.classes()));
    }
    for (const auto& row : outcomes.rows) {
        const std::string where = outcomes.source + ":" + std::to_string(row.line) + ": ";
        auto it = std::find_if(profiles.begin(), profiles.end(),
                               [&](const auto& p) { return p.aggregate_id == row.aggregate_id; });
        if (it == profiles.end()) {
            throw IntegrityError(where + "outcome for unknown aggregate '" + row.aggregate_id + "'");
        }
        if (row.counts.total() != it->total_demand()) {
            throw IntegrityError(where + "aggregate '" + row.aggregate_id + "' has " +
                                 std::to_string(row.counts.total()) +
                                 " observed products but a total demand of " +
                                 std::to_string(it->total_demand()));
        }
        it->observed = row.counts;
    }
}

void write_profiles(std::ostream& out, const std::vector<AggregateProfile>& profiles) {
    out << "aggregate,stratum,demand\n";
    for (const auto& p : profiles) {
        for (const auto& [stratum, demand] : p.demand) {
            out << csv::escape(p.aggregate_id) << "," << csv::escape(stratum) << "," << demand
                << "\n";
        }
    }
}

AssessmentPoint observed_point(const AggregateProfile& profile) {
    if (!profile.observed) {
        throw ValidationError("aggregate '" + profile.aggregate_id + "' has no observed outcome");
    }
    return AssessmentPoint::from_counts(*profile.observed);
}

}  // namespace geoscore
