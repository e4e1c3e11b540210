#include "geoscore/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

#include "geoscore/error.hpp"
#include "geoscore/sampler.hpp"

namespace geoscore {

namespace {

using boost::multiprecision::cpp_int;

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ContractViolation("epsilon must lie in (0, 1)");
}

// A tail bound of exactly 1 is trivially met by any N; it is accepted and clamps to N = 1.
void require_tail_bound(double tail_bound) {
    if (!(tail_bound > 0.0 && tail_bound <= 1.0)) {
        throw ContractViolation("tail_bound must lie in (0, 1]");
    }
}

cpp_int binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    cpp_int result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

// All class-count vectors summing to `draws` with entry j <= population[j],
// each with multiplicity prod_j C(population[j], k_j).
struct Configuration {
    std::vector<std::int64_t> counts;
    cpp_int multiplicity;
};

void enumerate(std::span<const std::int64_t> population, std::int64_t draws, std::size_t j,
               std::vector<std::int64_t>& current, const cpp_int& weight,
               std::vector<Configuration>& out, std::uint64_t cap) {
    if (j + 1 == population.size()) {
        if (draws > population[j]) return;
        current[j] = draws;
        out.push_back({current, weight * binomial(population[j], draws)});
        if (out.size() > cap) {
            throw EnumerationCapExceeded("exact enumeration exceeds the cap of " +
                                         std::to_string(cap) + " configurations");
        }
        return;
    }
    std::int64_t rest = 0;
    for (std::size_t i = j + 1; i < population.size(); ++i) rest += population[i];
    const std::int64_t lo = std::max<std::int64_t>(0, draws - rest);
    const std::int64_t hi = std::min(draws, population[j]);
    for (std::int64_t k = lo; k <= hi; ++k) {
        current[j] = k;
        enumerate(population, draws - k, j + 1, current, weight * binomial(population[j], k), out,
                  cap);
    }
}

}  // namespace

std::int64_t hoeffding_replicates(double epsilon, double tail_bound) {
    require_epsilon(epsilon);
    require_tail_bound(tail_bound);
    const double exact = std::log(1.0 / tail_bound) / (2.0 * epsilon * epsilon);
    auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(exact)));
    // Settle rounding in the closed form by evaluating the bound directly.
    while (n > 1 && hoeffding_bound(n - 1, epsilon) <= tail_bound) --n;
    while (hoeffding_bound(n, epsilon) > tail_bound) ++n;
    return n;
}

double hoeffding_bound(std::int64_t replicates, double epsilon) {
    if (replicates < 0) throw ContractViolation("replicate count must be non-negative");
    return std::exp(-2.0 * static_cast<double>(replicates) * epsilon * epsilon);
}

double hoeffding_half_width(std::int64_t replicates, double tail_bound) {
    if (replicates < 1) throw ContractViolation("replicate count must be positive");
    require_tail_bound(tail_bound);
    return std::sqrt(std::log(1.0 / tail_bound) / (2.0 * static_cast<double>(replicates)));
}

bool strictly_worse(double candidate, double reference, const EffortWeights& w,
                    std::int64_t total) {
    const double tol = 1e-12 * w.total() * static_cast<double>(std::max<std::int64_t>(total, 1));
    return candidate > reference + tol;
}

ScoreEstimate geometric_score(const AggregateProfile& profile, const AreaPopulation& pop,
                              const EffortWeights& w, const ScoreOptions& options) {
    if (options.replicates < 1) throw ContractViolation("need at least one replicate");
    if (!profile.observed) {
        throw ValidationError("aggregate '" + profile.aggregate_id + "' has no observed outcome");
    }
    if (w.steps() + 1 != pop.classes()) {
        throw ContractViolation("effort weights do not match the population's classes");
    }
    const SamplingPlan plan(profile, pop);
    const std::int64_t total = plan.total_demand();
    if (total <= 0) throw ValidationError("aggregate '" + profile.aggregate_id + "' demands no products");

    const double reference = delta_numerator(*profile.observed, w);
    const auto n_reps = options.replicates;
    const unsigned workers = static_cast<unsigned>(
        std::clamp<std::int64_t>(options.threads == 0 ? 1 : options.threads, 1, n_reps));

    auto count_range = [&](std::int64_t begin, std::int64_t end) {
        std::vector<std::int64_t> pooled(plan.classes());
        std::int64_t worse = 0;
        for (std::int64_t r = begin; r < end; ++r) {
            plan.draw_pooled({options.master_seed, static_cast<std::uint64_t>(r)}, pooled);
            if (strictly_worse(delta_numerator(std::span<const std::int64_t>(pooled), w), reference,
                               w, total)) {
                ++worse;
            }
        }
        return worse;
    };

    std::int64_t worse = 0;
    if (workers == 1) {
        worse = count_range(0, n_reps);
    } else {
        std::vector<std::int64_t> partial(workers, 0);
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < workers; ++t) {
                const std::int64_t begin = n_reps * t / workers;
                const std::int64_t end = n_reps * (t + 1) / workers;
                pool.emplace_back([&, t, begin, end] { partial[t] = count_range(begin, end); });
            }
        }
        worse = std::accumulate(partial.begin(), partial.end(), std::int64_t{0});
    }

    ScoreEstimate est;
    est.aggregate_id = profile.aggregate_id;
    est.delta_value = delta(observed_point(profile), w);
    est.worse_count = worse;
    est.replicates = n_reps;
    est.geo_score = static_cast<double>(worse) / static_cast<double>(n_reps);
    est.master_seed = options.master_seed;
    est.weights_preset = w.label();
    return est;
}

ExactScore exact_geometric_score(const AggregateProfile& profile, const AreaPopulation& pop,
                                 const EffortWeights& w, std::uint64_t cap) {
    if (!profile.observed) {
        throw ValidationError("aggregate '" + profile.aggregate_id + "' has no observed outcome");
    }
    validate_profile(profile, pop);
    if (w.steps() + 1 != pop.classes()) {
        throw ContractViolation("effort weights do not match the population's classes");
    }
    const std::int64_t total = profile.total_demand();
    if (total <= 0) {
        throw ValidationError("delta is undefined for an empty aggregate ('" +
                              profile.aggregate_id + "' demands no products)");
    }

    // Pooled count vector -> number of product subsets producing it.
    std::map<std::vector<std::int64_t>, cpp_int> pooled{
        {std::vector<std::int64_t>(pop.classes(), 0), cpp_int(1)}};
    cpp_int denominator = 1;
    std::uint64_t product = 1;
    for (const auto& s : pop.strata()) {
        const auto it = profile.demand.find(s.stratum_id);
        if (it == profile.demand.end() || it->second == 0) continue;
        std::vector<Configuration> configs;
        std::vector<std::int64_t> current(pop.classes(), 0);
        enumerate(s.class_counts.counts(), it->second, 0, current, cpp_int(1), configs, cap);
        if (configs.size() > cap / product) {
            throw EnumerationCapExceeded("exact enumeration exceeds the cap of " +
                                         std::to_string(cap) + " configurations");
        }
        product *= configs.size();
        denominator *= binomial(s.size(), it->second);

        std::map<std::vector<std::int64_t>, cpp_int> next;
        for (const auto& [acc, weight] : pooled) {
            for (const auto& c : configs) {
                auto key = acc;
                for (std::size_t j = 0; j < key.size(); ++j) key[j] += c.counts[j];
                next[std::move(key)] += weight * c.multiplicity;
            }
        }
        pooled = std::move(next);
    }

    const double reference = delta_numerator(*profile.observed, w);
    cpp_int worse = 0;
    for (const auto& [counts, weight] : pooled) {
        if (strictly_worse(delta_numerator(ClassCount(counts), w), reference, w, total)) {
            worse += weight;
        }
    }
    return ExactScore{Rational(worse, denominator), pooled.size()};
}

double r_score(const AggregateProfile& profile, const AreaPopulation& pop,
               const ClassScoreScale& scale, RDenominator denominator) {
    if (!profile.observed) {
        throw ValidationError("aggregate '" + profile.aggregate_id + "' has no observed outcome");
    }
    validate_profile(profile, pop);
    if (scale.classes() != pop.classes()) {
        throw ContractViolation("score scale does not match the population's classes");
    }
    const double numerator = scale.mean(*profile.observed);

    double baseline = 0.0;
    if (denominator == RDenominator::area) {
        baseline = scale.mean(pop.pooled_counts());
    } else {
        double weighted = 0.0;
        std::int64_t weight = 0;
        for (const auto& [stratum, demand] : profile.demand) {
            if (demand == 0) continue;
            weighted += static_cast<double>(demand) * scale.mean(pop.find(stratum)->class_counts);
            weight += demand;
        }
        if (weight == 0) {
            throw ValidationError("aggregate '" + profile.aggregate_id + "' demands no products");
        }
        baseline = weighted / static_cast<double>(weight);
    }
    if (!(baseline > 0.0)) {
        throw ValidationError("R score undefined: population mean score is zero");
    }
    return numerator / baseline;
}

std::vector<int> competition_ranks(const std::vector<double>& values) {
    std::vector<int> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        int better = 0;
        for (double v : values) {
            if (v > values[i]) ++better;
        }
        ranks[i] = better + 1;
    }
    return ranks;
}

RankTable rank(const std::vector<ScoreEstimate>& estimates, const std::vector<double>& r_scores) {
    if (estimates.size() != r_scores.size()) {
        throw ContractViolation("rank: " + std::to_string(estimates.size()) + " estimates but " +
                                std::to_string(r_scores.size()) + " R scores");
    }
    std::vector<double> geo(estimates.size());
    std::transform(estimates.begin(), estimates.end(), geo.begin(),
                   [](const auto& e) { return e.geo_score; });
    const auto r_ranks = competition_ranks(r_scores);
    const auto geo_ranks = competition_ranks(geo);

    RankTable table;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        table.rows.push_back(RankRow{estimates[i].aggregate_id, r_scores[i], r_ranks[i],
                                     estimates[i].geo_score, geo_ranks[i],
                                     estimates[i].delta_value});
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const auto& a, const auto& b) { return a.r_rank < b.r_rank; });
    return table;
}

}  // namespace geoscore
