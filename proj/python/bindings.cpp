#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "geoscore/engine.hpp"
#include "geoscore/error.hpp"
#include "geoscore/geometry.hpp"
#include "geoscore/population.hpp"
#include "geoscore/sampler.hpp"

namespace py = pybind11;
using namespace geoscore;

namespace {

AssessmentPoint point(const std::vector<double>& freqs) {
    return AssessmentPoint::from_frequencies(freqs);
}

// Weights given either as a preset name or as an explicit list.
EffortWeights weights_from(const py::object& w, std::size_t classes) {
    if (py::isinstance<py::str>(w)) return EffortWeights::parse(w.cast<std::string>(), classes);
    return EffortWeights(w.cast<std::vector<double>>());
}

AggregateProfile make_profile(std::string id, std::map<std::string, std::int64_t> demand,
                              std::optional<std::vector<std::int64_t>> observed) {
    AggregateProfile p{std::move(id), std::move(demand), std::nullopt};
    if (observed) p.observed = ClassCount(*observed);
    return p;
}

py::object to_fraction(const Rational& r) {
    auto fraction = py::module_::import("fractions").attr("Fraction");
    auto as_int = [](const auto& v) {
        return py::module_::import("builtins").attr("int")(v.str());
    };
    return fraction(as_int(boost::multiprecision::numerator(r)),
                    as_int(boost::multiprecision::denominator(r)));
}

py::dict estimate_dict(const ScoreEstimate& e) {
    py::dict d;
    d["aggregate"] = e.aggregate_id;
    d["delta"] = e.delta_value;
    d["geo_score"] = e.geo_score;
    d["worse"] = e.worse_count;
    d["replicates"] = e.replicates;
    d["seed"] = e.master_seed;
    d["weights"] = e.weights_preset;
    return d;
}

}  // namespace

PYBIND11_MODULE(_geoscore, m) {
    m.doc() = "Simplex scoring of ordinal assessments and Monte-Carlo geometric scores.";

    // Translators registered later are tried first, so subclasses follow the base.
    auto& base = py::register_exception<Error>(m, "GeoscoreError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<IntegrityError>(m, "IntegrityError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<EnumerationCapExceeded>(m, "EnumerationCapExceeded", base.ptr());

    m.def("delta", [](const std::vector<double>& p, const py::object& w) {
        return delta(point(p), weights_from(w, p.size()));
    }, py::arg("freqs"), py::arg("weights"));
    m.def("delta_unit", [](const std::vector<double>& p) { return delta_unit(point(p)); },
          py::arg("freqs"));
    m.def("delta_path_oracle", [](const std::vector<double>& p, const py::object& w) {
        return delta_path_oracle(point(p), weights_from(w, p.size()));
    }, py::arg("freqs"), py::arg("weights"));
    m.def("cumulative_map", [](const std::vector<double>& p) { return cumulative_map(point(p)); },
          py::arg("freqs"));
    m.def("minkowski_identity_check",
          [](const std::vector<double>& p) { return minkowski_identity_check(point(p)); },
          py::arg("freqs"));
    m.def("pseudo_distance",
          [](const std::vector<double>& p, const std::vector<double>& q, const py::object& w) {
              return pseudo_distance(point(p), point(q), weights_from(w, p.size()));
          },
          py::arg("p"), py::arg("q"), py::arg("weights"));
    m.def("same_score_class",
          [](const std::vector<double>& p, const std::vector<double>& q, const py::object& w,
             double tol) {
              return same_score_class(point(p), point(q), weights_from(w, p.size()), tol);
          },
          py::arg("p"), py::arg("q"), py::arg("weights"), py::arg("tol") = 1e-12);
    m.def("frequencies", [](const std::vector<std::int64_t>& counts) {
        const auto p = AssessmentPoint::from_counts(ClassCount(counts));
        return std::vector<double>(p.freqs().begin(), p.freqs().end());
    }, py::arg("counts"));
    m.def("weights_preset", [](const std::string& name, std::size_t classes) {
        const auto w = EffortWeights::preset(name, classes);
        return std::vector<double>(w.weights().begin(), w.weights().end());
    }, py::arg("name"), py::arg("classes") = 5);

    m.def("hoeffding_replicates", &hoeffding_replicates, py::arg("epsilon"),
          py::arg("tail_bound"));
    m.def("hoeffding_bound", &hoeffding_bound, py::arg("replicates"), py::arg("epsilon"));
    m.def("hoeffding_half_width", &hoeffding_half_width, py::arg("replicates"),
          py::arg("tail_bound"));

    py::class_<AreaPopulation>(m, "AreaPopulation")
        .def_static("from_csv", [](const std::string& text, bool accept_inconsistent_totals) {
            std::istringstream in(text);
            return read_population(in, "<string>",
                                   accept_inconsistent_totals ? TotalsPolicy::counts
                                                              : TotalsPolicy::strict)
                .population;
        }, py::arg("text"), py::arg("accept_inconsistent_totals") = false)
        .def_static("load", [](const std::string& path, bool accept_inconsistent_totals) {
            return load_population_file(path, accept_inconsistent_totals ? TotalsPolicy::counts
                                                                         : TotalsPolicy::strict);
        }, py::arg("path"), py::arg("accept_inconsistent_totals") = false)
        .def_property_readonly("area_id", &AreaPopulation::area_id)
        .def_property_readonly("class_labels", &AreaPopulation::class_labels)
        .def_property_readonly("strata", [](const AreaPopulation& pop) {
            py::list out;
            for (const auto& s : pop.strata()) {
                const auto c = s.class_counts.counts();
                out.append(py::make_tuple(s.stratum_id, std::vector<std::int64_t>(c.begin(), c.end()),
                                          s.expected_total));
            }
            return out;
        })
        .def("to_csv", [](const AreaPopulation& pop) {
            std::ostringstream out;
            write_population(out, pop);
            return out.str();
        });

    py::class_<AggregateProfile>(m, "AggregateProfile")
        .def(py::init(&make_profile), py::arg("aggregate_id"), py::arg("demand"),
             py::arg("observed") = py::none())
        .def_readonly("aggregate_id", &AggregateProfile::aggregate_id)
        .def_readonly("demand", &AggregateProfile::demand)
        .def_property_readonly("observed", [](const AggregateProfile& p) -> py::object {
            if (!p.observed) return py::none();
            const auto c = p.observed->counts();
            return py::cast(std::vector<std::int64_t>(c.begin(), c.end()));
        })
        .def("validate", [](const AggregateProfile& p, const AreaPopulation& pop) {
            validate_profile(p, pop);
        });

    m.def("draw_stratum", [](const AreaPopulation& pop, const std::string& stratum,
                             std::int64_t demand, std::uint64_t seed, std::uint64_t replicate) {
        const auto idx = pop.index_of(stratum);
        if (!idx) throw IntegrityError("unknown stratum '" + stratum + "'");
        const auto drawn = draw_stratum(pop.strata()[*idx], demand, {seed, replicate},
                                        static_cast<std::uint32_t>(*idx));
        return std::vector<std::int64_t>(drawn.counts().begin(), drawn.counts().end());
    }, py::arg("population"), py::arg("stratum"), py::arg("demand"), py::arg("seed"),
          py::arg("replicate") = 0);

    m.def("draw_ideal", [](const AggregateProfile& profile, const AreaPopulation& pop,
                           std::uint64_t seed, std::uint64_t replicate) {
        const auto ideal = draw_ideal(profile, pop, {seed, replicate});
        py::dict per_stratum;
        for (const auto& [id, c] : ideal.per_stratum) {
            per_stratum[py::str(id)] = std::vector<std::int64_t>(c.counts().begin(), c.counts().end());
        }
        const auto pooled = ideal.class_counts.counts();
        return py::make_tuple(std::vector<std::int64_t>(pooled.begin(), pooled.end()), per_stratum);
    }, py::arg("profile"), py::arg("population"), py::arg("seed"), py::arg("replicate") = 0);

    m.def("geometric_score", [](const AggregateProfile& profile, const AreaPopulation& pop,
                                const py::object& weights, std::int64_t replicates,
                                std::uint64_t seed, unsigned threads) {
        const auto w = weights_from(weights, pop.classes());
        ScoreEstimate est;
        {
            py::gil_scoped_release release;
            est = geometric_score(profile, pop, w, {replicates, seed, threads});
        }
        return estimate_dict(est);
    }, py::arg("profile"), py::arg("population"), py::arg("weights") = "A",
          py::arg("replicates") = kDefaultReplicates, py::arg("seed"), py::arg("threads") = 1);

    m.def("exact_geometric_score", [](const AggregateProfile& profile, const AreaPopulation& pop,
                                      const py::object& weights, std::uint64_t cap) {
        return to_fraction(
            exact_geometric_score(profile, pop, weights_from(weights, pop.classes()), cap).value);
    }, py::arg("profile"), py::arg("population"), py::arg("weights") = "A",
          py::arg("cap") = kDefaultEnumerationCap);

    m.def("r_score", [](const AggregateProfile& profile, const AreaPopulation& pop,
                        std::optional<std::vector<double>> scale, const std::string& denominator) {
        const auto s = scale ? ClassScoreScale(*scale) : ClassScoreScale::vqr();
        RDenominator d = RDenominator::stratum_weighted;
        if (denominator == "area") {
            d = RDenominator::area;
        } else if (denominator != "stratum-weighted") {
            throw ContractViolation("denominator must be 'stratum-weighted' or 'area'");
        }
        return r_score(profile, pop, s, d);
    }, py::arg("profile"), py::arg("population"), py::arg("scale") = py::none(),
          py::arg("denominator") = "stratum-weighted");

    m.def("competition_ranks", &competition_ranks, py::arg("values"));
}
