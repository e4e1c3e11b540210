#pragma once

// Test-only reference computations. Nothing here calls into the code paths it
// is used to check: deltas are evaluated from cumulative frequencies, and
// geometric scores come from enumerating concrete product subsets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace geoscore::oracle {

/// delta = sum_k a_k (1 - s_k), s_k the cumulative frequency of the k best classes.
inline double delta_cumulative(const std::vector<double>& x, const std::vector<double>& a) {
    double s = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += x[k];
        total += a[k] * (1.0 - s);
    }
    return total;
}

inline double delta_counts(const std::vector<std::int64_t>& counts, const std::vector<double>& a) {
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    std::vector<double> x;
    for (auto c : counts) x.push_back(static_cast<double>(c) / static_cast<double>(total));
    return delta_cumulative(x, a);
}

inline double binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

/// Exact multivariate hypergeometric probability of `draw` from `population`.
inline double mv_hypergeometric_pmf(const std::vector<std::int64_t>& population,
                                    const std::vector<std::int64_t>& draw) {
    std::int64_t n_total = 0, d_total = 0;
    double num = 1.0;
    for (std::size_t j = 0; j < population.size(); ++j) {
        num *= binomial(population[j], draw[j]);
        n_total += population[j];
        d_total += draw[j];
    }
    return num / binomial(n_total, d_total);
}

/// Every size-`k` subset of the items (each item is its class index).
inline std::vector<std::vector<std::int64_t>> subset_class_counts(
    const std::vector<std::int64_t>& population, std::int64_t k) {
    std::vector<int> items;
    for (std::size_t j = 0; j < population.size(); ++j) {
        for (std::int64_t c = 0; c < population[j]; ++c) items.push_back(static_cast<int>(j));
    }
    std::vector<std::vector<std::int64_t>> out;
    std::vector<bool> mask(items.size(), false);
    std::fill(mask.begin(), mask.begin() + k, true);
    do {
        std::vector<std::int64_t> counts(population.size(), 0);
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (mask[i]) ++counts[items[i]];
        }
        out.push_back(std::move(counts));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return out;
}

struct BruteForceScore {
    std::uint64_t worse = 0;
    std::uint64_t total = 0;
    double value() const { return static_cast<double>(worse) / static_cast<double>(total); }
};

/// Geometric score by listing every tuple of per-stratum product subsets.
/// Ties are decided with an absolute tolerance of 1e-9 on delta.
inline BruteForceScore brute_force_score(const std::vector<std::vector<std::int64_t>>& strata,
                                         const std::vector<std::int64_t>& demand,
                                         const std::vector<std::int64_t>& observed,
                                         const std::vector<double>& a) {
    std::vector<std::vector<std::vector<std::int64_t>>> options;
    for (std::size_t i = 0; i < strata.size(); ++i) {
        options.push_back(subset_class_counts(strata[i], demand[i]));
    }
    const double reference = delta_counts(observed, a);
    BruteForceScore result;
    std::vector<std::int64_t> pooled(observed.size(), 0);
    std::function<void(std::size_t)> walk = [&](std::size_t i) {
        if (i == options.size()) {
            ++result.total;
            if (delta_counts(pooled, a) > reference + 1e-9) ++result.worse;
            return;
        }
        for (const auto& c : options[i]) {
            for (std::size_t j = 0; j < c.size(); ++j) pooled[j] += c[j];
            walk(i + 1);
            for (std::size_t j = 0; j < c.size(); ++j) pooled[j] -= c[j];
        }
    };
    walk(0);
    return result;
}

/// Uniform point of the simplex (normalized exponentials).
inline std::vector<double> random_simplex_point(std::mt19937_64& rng, std::size_t classes) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(classes);
    double sum = 0.0;
    for (auto& v : x) {
        v = e(rng);
        sum += v;
    }
    for (auto& v : x) v /= sum;
    return x;
}

}  // namespace geoscore::oracle
