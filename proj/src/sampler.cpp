#include "geoscore/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "geoscore/error.hpp"

namespace geoscore {

LogFactorialTable::LogFactorialTable(std::int64_t max_n) {
    if (max_n < 0) throw ContractViolation("log-factorial table size must be non-negative");
    table_.resize(static_cast<std::size_t>(max_n) + 1);
    for (std::size_t k = 0; k < table_.size(); ++k) {
        table_[k] = std::lgamma(static_cast<double>(k) + 1.0);
    }
}

std::int64_t draw_hypergeometric(std::int64_t good, std::int64_t bad, std::int64_t draws,
                                 PhiloxStream& rng, const LogFactorialTable& log_fact) {
    if (good < 0 || bad < 0 || draws < 0 || draws > good + bad) {
        throw ContractViolation("hypergeometric parameters out of range");
    }
    const std::int64_t total = good + bad;
    if (total > log_fact.max_n()) throw ContractViolation("log-factorial table too small");

    const std::int64_t lo = std::max<std::int64_t>(0, draws - bad);
    const std::int64_t hi = std::min(draws, good);
    if (lo == hi) return lo;

    auto mode = static_cast<std::int64_t>(
        std::floor(static_cast<double>(draws + 1) * static_cast<double>(good + 1) /
                   static_cast<double>(total + 2)));
    mode = std::clamp(mode, lo, hi);

    const double log_pmf = log_fact(good) - log_fact(mode) - log_fact(good - mode) + log_fact(bad) -
                           log_fact(draws - mode) - log_fact(bad - draws + mode) - log_fact(total) +
                           log_fact(draws) + log_fact(total - draws);
    const double p_mode = std::exp(log_pmf);

    double u = rng.uniform01();
    if (u < p_mode) return mode;
    u -= p_mode;

    const auto g = static_cast<double>(good);
    const auto b = static_cast<double>(bad);
    const auto n = static_cast<double>(draws);
    double p_down = p_mode;
    double p_up = p_mode;
    std::int64_t k_down = mode;
    std::int64_t k_up = mode;
    while (k_down > lo || k_up < hi) {
        if (k_down > lo) {
            const auto k = static_cast<double>(k_down);
            p_down *= k * (b - n + k) / ((g - k + 1.0) * (n - k + 1.0));
            --k_down;
            if (u < p_down) return k_down;
            u -= p_down;
        }
        if (k_up < hi) {
            const auto k = static_cast<double>(k_up);
            p_up *= (g - k) * (n - k) / ((k + 1.0) * (b - n + k + 1.0));
            ++k_up;
            if (u < p_up) return k_up;
            u -= p_up;
        }
    }
    // Only reachable through rounding in the pmf (mass deficit below 1e-12).
    return mode;
}

void draw_multivariate(std::span<const std::int64_t> population, std::int64_t draws,
                       PhiloxStream& rng, const LogFactorialTable& log_fact,
                       std::span<std::int64_t> out) {
    if (out.size() != population.size()) throw ContractViolation("output size mismatch");
    std::int64_t remaining_pop = 0;
    for (auto c : population) remaining_pop += c;
    if (draws < 0 || draws > remaining_pop) {
        throw IntegrityError("cannot draw " + std::to_string(draws) + " products from a population of " +
                             std::to_string(remaining_pop));
    }
    std::int64_t remaining = draws;
    for (std::size_t j = 0; j < population.size(); ++j) {
        if (remaining == 0) {
            out[j] = 0;
            continue;
        }
        const std::int64_t good = population[j];
        if (j + 1 == population.size()) {
            out[j] = remaining;
        } else {
            out[j] = draw_hypergeometric(good, remaining_pop - good, remaining, rng, log_fact);
        }
        remaining -= out[j];
        remaining_pop -= good;
    }
}

ClassCount draw_stratum(const StratumPopulation& pop, std::int64_t demand, SamplerSeed seed,
                        std::uint32_t stratum_index) {
    if (demand < 0 || demand > pop.size()) {
        throw IntegrityError("demand " + std::to_string(demand) + " in stratum '" + pop.stratum_id +
                             "' exceeds its population of " + std::to_string(pop.size()));
    }
    const LogFactorialTable log_fact(pop.size());
    PhiloxStream rng(seed.master_seed, seed.replicate_index, stratum_index);
    std::vector<std::int64_t> out(pop.class_counts.classes());
    draw_multivariate(pop.class_counts.counts(), demand, rng, log_fact, out);
    return ClassCount(std::move(out));
}

SamplingPlan::SamplingPlan(const AggregateProfile& profile, const AreaPopulation& pop)
    : classes_(pop.classes()), log_fact_([&] {
          std::int64_t largest = 0;
          for (const auto& s : pop.strata()) largest = std::max(largest, s.size());
          return largest;
      }()) {
    validate_profile(profile, pop);
    for (std::size_t i = 0; i < pop.strata().size(); ++i) {
        const auto& s = pop.strata()[i];
        const auto it = profile.demand.find(s.stratum_id);
        if (it == profile.demand.end()) continue;
        const auto counts = s.class_counts.counts();
        entries_.push_back(Entry{s.stratum_id, static_cast<std::uint32_t>(i),
                                 std::vector<std::int64_t>(counts.begin(), counts.end()),
                                 it->second});
        total_demand_ += it->second;
    }
}

void SamplingPlan::draw_pooled(SamplerSeed seed, std::span<std::int64_t> pooled) const {
    std::fill(pooled.begin(), pooled.end(), 0);
    std::int64_t buffer[16];
    std::vector<std::int64_t> heap;
    std::span<std::int64_t> scratch;
    if (classes_ <= 16) {
        scratch = std::span<std::int64_t>(buffer, classes_);
    } else {
        heap.resize(classes_);
        scratch = heap;
    }
    for (const auto& e : entries_) {
        if (e.demand == 0) continue;
        PhiloxStream rng(seed.master_seed, seed.replicate_index, e.index);
        draw_multivariate(e.counts, e.demand, rng, log_fact_, scratch);
        for (std::size_t j = 0; j < classes_; ++j) pooled[j] += scratch[j];
    }
}

IdealAggregate SamplingPlan::draw(SamplerSeed seed) const {
    IdealAggregate ideal{ClassCount::zeros(classes_), {}};
    std::vector<std::int64_t> scratch(classes_);
    for (const auto& e : entries_) {
        std::fill(scratch.begin(), scratch.end(), 0);
        if (e.demand > 0) {
            PhiloxStream rng(seed.master_seed, seed.replicate_index, e.index);
            draw_multivariate(e.counts, e.demand, rng, log_fact_, scratch);
        }
        ClassCount drawn(scratch);
        ideal.class_counts += drawn;
        ideal.per_stratum.emplace(e.stratum_id, std::move(drawn));
    }
    return ideal;
}

IdealAggregate draw_ideal(const AggregateProfile& profile, const AreaPopulation& pop,
                          SamplerSeed seed) {
    return SamplingPlan(profile, pop).draw(seed);
}

}  // namespace geoscore
