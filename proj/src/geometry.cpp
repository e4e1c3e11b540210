#include "geoscore/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geoscore/error.hpp"

namespace geoscore {

namespace {

void require_matching(const AssessmentPoint& p, const EffortWeights& w) {
    if (w.steps() + 1 != p.classes()) {
        throw ContractViolation("effort weights have " + std::to_string(w.steps()) +
                                " entries but the point has " + std::to_string(p.classes()) +
                                " classes (expected classes - 1 weights)");
    }
}

void require_same_dimension(const AssessmentPoint& p, const AssessmentPoint& q) {
    if (p.classes() != q.classes()) {
        throw ContractViolation("points have different numbers of classes (" +
                                std::to_string(p.classes()) + " vs " +
                                std::to_string(q.classes()) + ")");
    }
}

// Norm of a displacement in the scalar product g. With v1 = e1 and
// v_{i+1} = e_{i+1} - e_i, the coordinate of d along v_k is the tail sum
// c_k = d_k + ... + d_{m}; |d|_g^2 = c_1^2 + sum_k a_{k-1}^2 c_k^2.
double g_norm(std::span<const double> d, std::span<const double> a) {
    double tail = 0.0;
    double sq = 0.0;
    for (std::size_t k = d.size(); k-- > 0;) {
        tail += d[k];
        const double scale = k == 0 ? 1.0 : a[k - 1];
        sq += (scale * tail) * (scale * tail);
    }
    return std::sqrt(sq);
}

double path_length(std::vector<double> y, std::span<const double> a) {
    const std::size_t m = y.size();
    if (m < 2) return 0.0;
    const double head = y[0];
    const double rest = 1.0 - head;
    if (rest <= 0.0) return 0.0;

    // Foot of the path on the edge P1-P2: (y1, 1 - y1, 0, ..., 0).
    std::vector<double> to_best(m, 0.0);
    to_best[0] = rest;
    to_best[1] = -rest;
    const double edge = g_norm(to_best, a);

    std::vector<double> reduced(y.begin() + 1, y.end());
    for (double& v : reduced) v /= rest;
    return edge + rest * path_length(std::move(reduced), a.subspan(1));
}

}  // namespace

ClassCount::ClassCount(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] < 0) {
            throw ValidationError("class count " + std::to_string(i) + " is negative (" +
                                  std::to_string(counts_[i]) + ")");
        }
    }
}

ClassCount ClassCount::zeros(std::size_t classes) {
    return ClassCount(std::vector<std::int64_t>(classes, 0));
}

std::int64_t ClassCount::total() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

ClassCount& ClassCount::operator+=(const ClassCount& other) {
    if (other.classes() != classes()) {
        throw ContractViolation("cannot add class counts of different lengths");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
}

AssessmentPoint AssessmentPoint::from_counts(const ClassCount& counts) {
    if (counts.classes() < 2) throw ValidationError("an assessment needs at least 2 classes");
    const auto total = counts.total();
    if (total <= 0) throw ValidationError("cannot form frequencies from an all-zero count");
    std::vector<double> freqs(counts.classes());
    const double denom = static_cast<double>(total);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        freqs[i] = static_cast<double>(counts[i]) / denom;
    }
    return AssessmentPoint(std::move(freqs));
}

AssessmentPoint AssessmentPoint::from_frequencies(std::vector<double> freqs) {
    if (freqs.size() < 2) throw ValidationError("an assessment needs at least 2 classes");
    double sum = 0.0;
    for (double f : freqs) {
        if (!std::isfinite(f)) throw ValidationError("frequency is not finite");
        if (f < 0.0) throw ValidationError("frequency is negative");
        sum += f;
    }
    if (std::abs(sum - 1.0) > kRenormalizeTolerance) {
        throw ValidationError("frequencies sum to " + std::to_string(sum) + ", not 1");
    }
    if (sum != 1.0) {
        for (double& f : freqs) f /= sum;
    }
    return AssessmentPoint(std::move(freqs));
}

AssessmentPoint AssessmentPoint::vertex(std::size_t classes, std::size_t index) {
    if (classes < 2) throw ValidationError("an assessment needs at least 2 classes");
    if (index >= classes) throw ContractViolation("vertex index out of range");
    std::vector<double> freqs(classes, 0.0);
    freqs[index] = 1.0;
    return AssessmentPoint(std::move(freqs));
}

EffortWeights::EffortWeights(std::vector<double> weights, std::string label)
    : weights_(std::move(weights)), label_(std::move(label)) {
    if (weights_.empty()) throw ValidationError("effort weights must not be empty");
    for (double a : weights_) {
        if (!std::isfinite(a)) throw ValidationError("effort weight is not finite");
        if (a <= 0.0) throw ValidationError("effort weights must be positive");
    }
}

EffortWeights EffortWeights::preset(std::string_view name, std::size_t classes) {
    if (classes < 2) throw ContractViolation("presets need at least 2 classes");
    if (name == "A") return EffortWeights(std::vector<double>(classes - 1, 1.0), "A");
    if (name == "B" || name == "C") {
        if (classes != 5) {
            throw ContractViolation("preset " + std::string(name) +
                                    " is defined for 5 classes only");
        }
        if (name == "B") return EffortWeights({3.0, 3.0, 3.0, 1.0}, "B");
        return EffortWeights({1.0, 1.0, 1.5, 1.0}, "C");
    }
    throw ValidationError("unknown weight preset '" + std::string(name) + "'");
}

EffortWeights EffortWeights::parse(std::string_view spec, std::size_t classes) {
    if (spec.find(',') == std::string_view::npos &&
        (spec == "A" || spec == "B" || spec == "C")) {
        return preset(spec, classes);
    }
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto end = std::min(spec.find(',', start), spec.size());
        const std::string field(spec.substr(start, end - start));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != field.size()) {
            throw ValidationError("cannot parse effort weight '" + field + "' in '" +
                                  std::string(spec) + "'");
        }
        values.push_back(v);
        start = end + 1;
    }
    if (values.size() + 1 != classes) {
        throw ContractViolation("weights '" + std::string(spec) + "' have " +
                                std::to_string(values.size()) + " entries; expected " +
                                std::to_string(classes - 1));
    }
    return EffortWeights(std::move(values), std::string(spec));
}

EffortWeights EffortWeights::unit(std::size_t steps) {
    return EffortWeights(std::vector<double>(steps, 1.0), "unit");
}

double EffortWeights::total() const noexcept {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

EffortWeights EffortWeights::scaled(double factor) const {
    std::vector<double> w = weights_;
    for (double& a : w) a *= factor;
    return EffortWeights(std::move(w), label_);
}

double delta(const AssessmentPoint& p, const EffortWeights& w) {
    require_matching(p, w);
    const auto a = w.weights();
    const auto x = p.freqs();
    // suffix = a_i + ... + a_n, walked from the back.
    double suffix = 0.0;
    double acc = 0.0;
    for (std::size_t i = a.size(); i-- > 0;) {
        suffix += a[i];
        acc += suffix * x[i];
    }
    return std::max(0.0, suffix - acc);
}

double delta_unit(const AssessmentPoint& p) {
    return delta(p, EffortWeights::unit(p.classes() - 1));
}

double delta_path_oracle(const AssessmentPoint& p, const EffortWeights& w) {
    require_matching(p, w);
    const auto x = p.freqs();
    return path_length(std::vector<double>(x.begin(), x.end()), w.weights());
}

double delta_numerator(std::span<const std::int64_t> counts, const EffortWeights& w) {
    if (w.steps() + 1 != counts.size()) {
        throw ContractViolation("effort weights do not match the number of classes");
    }
    const auto a = w.weights();
    const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    std::int64_t cumulative = 0;
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        cumulative += counts[k];
        acc += a[k] * static_cast<double>(total - cumulative);
    }
    return acc;
}

std::vector<double> cumulative_map(const AssessmentPoint& p) {
    const auto x = p.freqs();
    std::vector<double> s(x.size());
    double running = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        running += x[i];
        s[i] = std::min(running, 1.0);
    }
    s.back() = 1.0;
    return s;
}

bool minkowski_identity_check(const AssessmentPoint& p, double tol) {
    const auto s = cumulative_map(p);
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) l1 += std::abs(s[i] - 1.0);
    return std::abs(delta_unit(p) - l1) <= tol;
}

double pseudo_distance(const AssessmentPoint& p, const AssessmentPoint& q, const EffortWeights& w) {
    require_same_dimension(p, q);
    return std::abs(delta(p, w) - delta(q, w));
}

bool same_score_class(const AssessmentPoint& p, const AssessmentPoint& q, const EffortWeights& w,
                      double tol) {
    if (!(tol >= 0.0)) throw ContractViolation("tolerance must be non-negative");
    return pseudo_distance(p, q, w) <= tol;
}

}  // namespace geoscore
