#pragma once

// Ordinal assessment outcomes as points of the standard simplex, and the
// weighted path length (delta) from such a point to the best vertex.
//
// Class order is best-first everywhere: slot 0 is the best class (vertex P1).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geoscore {

/// Exact per-class counts, best class first.
class ClassCount {
  public:
    ClassCount() = default;
    explicit ClassCount(std::vector<std::int64_t> counts);
    /// All-zero counts over `classes` classes.
    static ClassCount zeros(std::size_t classes);

    std::span<const std::int64_t> counts() const noexcept { return counts_; }
    std::size_t classes() const noexcept { return counts_.size(); }
    std::int64_t total() const noexcept;
    std::int64_t operator[](std::size_t i) const { return counts_[i]; }

    ClassCount& operator+=(const ClassCount& other);
    bool operator==(const ClassCount&) const = default;

  private:
    std::vector<std::int64_t> counts_;
};

/// Relative frequencies over n+1 >= 2 ordinal classes; a point of the simplex.
class AssessmentPoint {
  public:
    /// Tolerance on |sum - 1| below which real-valued input is renormalized.
    static constexpr double kRenormalizeTolerance = 1e-9;

    /// Normalizes exact counts once. Throws ValidationError if the total is zero.
    static AssessmentPoint from_counts(const ClassCount& counts);
    /// Accepts frequencies summing to 1 within kRenormalizeTolerance (renormalized),
    /// rejects anything else.
    static AssessmentPoint from_frequencies(std::vector<double> freqs);
    /// Indicator point of vertex `index` (0-based, 0 = best).
    static AssessmentPoint vertex(std::size_t classes, std::size_t index);

    std::span<const double> freqs() const noexcept { return freqs_; }
    std::size_t classes() const noexcept { return freqs_.size(); }
    double operator[](std::size_t i) const { return freqs_[i]; }

  private:
    explicit AssessmentPoint(std::vector<double> freqs) : freqs_(std::move(freqs)) {}
    std::vector<double> freqs_;
};

/// Positive upgrade efforts a_1..a_n; weight i is the effort from class i+1 up to class i.
class EffortWeights {
  public:
    EffortWeights(std::vector<double> weights, std::string label = "custom");

    /// Named presets: "A" (all ones, any length; requires `classes`), "B" = (3,3,3,1),
    /// "C" = (1,1,1.5,1). B and C only exist for 5 classes.
    static EffortWeights preset(std::string_view name, std::size_t classes = 5);
    /// Parses either a preset name or a comma-separated list such as "1,1,1.5,1".
    static EffortWeights parse(std::string_view spec, std::size_t classes);
    static EffortWeights unit(std::size_t steps);

    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t steps() const noexcept { return weights_.size(); }
    double total() const noexcept;
    const std::string& label() const noexcept { return label_; }
    EffortWeights scaled(double factor) const;

  private:
    std::vector<double> weights_;
    std::string label_;
};

/// Closed form: sum(a) - sum_i (a_i + ... + a_n) x_i. Lower is better; range [0, sum(a)].
double delta(const AssessmentPoint& p, const EffortWeights& w);

/// delta with all weights equal to 1: n - n x_1 - (n-1) x_2 - ... - x_n.
double delta_unit(const AssessmentPoint& p);

/// Builds the path to the best vertex explicitly: project along the facet opposite P1
/// onto the edge P1-P2 of the current simplex, then recurse on the reduced simplex
/// through the homothety 1/(1-x1). Segment lengths are g-norms in the basis
/// v1 = P1, v_{i+1} = P_{i+1} - P_i with |v_{i+1}|_g = a_i. Independent of delta().
double delta_path_oracle(const AssessmentPoint& p, const EffortWeights& w);

/// T * delta for exact counts with total T: sum_k a_k (T - C_k), C_k the cumulative count.
double delta_numerator(std::span<const std::int64_t> counts, const EffortWeights& w);
inline double delta_numerator(const ClassCount& counts, const EffortWeights& w) {
    return delta_numerator(counts.counts(), w);
}

/// (x1, x1+x2, ..., 1): the bijection onto non-decreasing tuples ending at 1.
std::vector<double> cumulative_map(const AssessmentPoint& p);

/// delta_unit(p) == sum_{i<n} |s_i - 1| over the cumulative coordinates, to `tol`.
bool minkowski_identity_check(const AssessmentPoint& p, double tol = 1e-12);

/// |delta(p) - delta(q)|: symmetric, triangle inequality, zero on a whole hyperplane.
double pseudo_distance(const AssessmentPoint& p, const AssessmentPoint& q, const EffortWeights& w);

bool same_score_class(const AssessmentPoint& p, const AssessmentPoint& q, const EffortWeights& w,
                      double tol);

}  // namespace geoscore
