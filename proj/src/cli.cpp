#include "geoscore/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "csv.hpp"
#include "geoscore/engine.hpp"
#include "geoscore/error.hpp"
#include "geoscore/population.hpp"
#include "json.hpp"

namespace geoscore::cli {

namespace {

using Json = nlohmann::ordered_json;

/// A file named on the command line could not be read.
class InputError : public Error {
  public:
    using Error::Error;
};

struct RunConfig {
    std::string population_path;
    std::string profiles_path;
    std::string outcomes_path;
    std::vector<std::string> weights;
    std::string replicates = std::to_string(kDefaultReplicates);
    double epsilon = kDefaultEpsilon;
    double tail_bound = 4.54e-5;
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    std::string output_path;
    std::string r_denominator = "stratum-weighted";
    std::string scale;
    unsigned threads = 1;
    bool accept_inconsistent_totals = false;
};

// One report: column names plus rows of cells. Numeric cells keep their value
// so JSON can emit numbers while CSV prints the same shortest representation.
struct Cell {
    std::variant<std::string, std::int64_t, std::uint64_t, double> value;
};

struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v) {
    if (!std::isfinite(v)) throw Error("refusing to emit a non-finite value");
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void emit(const Report& report, const RunConfig& config, std::ostream& out) {
    std::ostringstream text;
    if (config.format == "json") {
        Json array = Json::array();
        for (const auto& row : report.rows) {
            Json obj = Json::object();
            for (std::size_t i = 0; i < row.size(); ++i) {
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, double>) {
                            if (!std::isfinite(v)) throw Error("refusing to emit a non-finite value");
                        }
                        obj[report.columns[i]] = v;
                    },
                    row[i].value);
            }
            array.push_back(std::move(obj));
        }
        text << array.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < report.columns.size(); ++i) {
            text << (i ? "," : "") << report.columns[i];
        }
        text << "\n";
        for (const auto& row : report.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) text << ",";
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, std::string>) {
                            text << csv::escape(v);
                        } else if constexpr (std::is_same_v<T, double>) {
                            text << format_double(v);
                        } else {
                            text << v;
                        }
                    },
                    row[i].value);
            }
            text << "\n";
        }
    }
    if (config.output_path.empty()) {
        out << text.str();
    } else {
        std::ofstream file(config.output_path, std::ios::binary);
        if (!file) throw InputError("cannot write '" + config.output_path + "'");
        file << text.str();
    }
}

void require_readable(const std::string& path, const char* what) {
    if (path.empty()) throw InputError(std::string("missing --") + what);
    if (!std::filesystem::is_regular_file(path)) {
        throw InputError(std::string(what) + " file '" + path + "' does not exist or is not a file");
    }
    std::ifstream probe(path);
    if (!probe) throw InputError("cannot read " + std::string(what) + " file '" + path + "'");
}

std::vector<EffortWeights> resolve_weights(const RunConfig& config, std::size_t classes) {
    std::vector<std::string> specs = config.weights;
    if (specs.empty()) {
        specs = classes == 5 ? std::vector<std::string>{"A", "B", "C"}
                             : std::vector<std::string>{"A"};
    }
    std::vector<EffortWeights> out;
    for (const auto& s : specs) out.push_back(EffortWeights::parse(s, classes));
    return out;
}

std::int64_t resolve_replicates(const RunConfig& config) {
    if (config.replicates == "auto") return hoeffding_replicates(config.epsilon, config.tail_bound);
    std::int64_t n = 0;
    const auto& s = config.replicates;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || ptr != s.data() + s.size() || n < 1) {
        throw ContractViolation("--replicates must be a positive integer or 'auto', got '" + s + "'");
    }
    return n;
}

struct Inputs {
    AreaPopulation population;
    std::vector<AggregateProfile> profiles;
};

AreaPopulation read_population_checked(const RunConfig& config, std::ostream& err) {
    require_readable(config.population_path, "population");
    std::ifstream in(config.population_path);
    const auto policy =
        config.accept_inconsistent_totals ? TotalsPolicy::counts : TotalsPolicy::strict;
    auto load = read_population(in, config.population_path, policy);
    for (const auto& issue : load.issues) {
        err << "warning: " << issue.describe() << " (class counts used)\n";
    }
    return std::move(load.population);
}

Inputs read_inputs(const RunConfig& config, std::ostream& err) {
    require_readable(config.population_path, "population");
    require_readable(config.profiles_path, "profiles");
    require_readable(config.outcomes_path, "outcomes");
    auto pop = read_population_checked(config, err);
    auto profiles = load_profiles_file(config.profiles_path, pop);
    attach_outcomes(load_outcomes_file(config.outcomes_path), pop, profiles);
    for (const auto& p : profiles) {
        if (!p.observed) {
            throw IntegrityError("aggregate '" + p.aggregate_id + "' has no row in '" +
                                 config.outcomes_path + "'");
        }
    }
    return Inputs{std::move(pop), std::move(profiles)};
}

std::uint64_t require_seed(const RunConfig& config) {
    if (!config.seed) throw ContractViolation("--seed is required for scoring commands");
    return *config.seed;
}

int cmd_delta(const RunConfig& config, std::ostream& out, std::ostream&) {
    require_readable(config.outcomes_path, "outcomes");
    const auto outcomes = load_outcomes_file(config.outcomes_path);
    const auto weights = resolve_weights(config, outcomes.class_labels.size());

    Report report;
    report.columns.push_back("aggregate");
    for (const auto& w : weights) report.columns.push_back("delta_" + w.label());
    for (const auto& row : outcomes.rows) {
        const auto point = AssessmentPoint::from_counts(row.counts);
        std::vector<Cell> cells{{row.aggregate_id}};
        for (const auto& w : weights) cells.push_back({delta(point, w)});
        report.rows.push_back(std::move(cells));
    }
    emit(report, config, out);
    return kOk;
}

int cmd_score(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto seed = require_seed(config);
    const auto n_reps = resolve_replicates(config);
    const auto inputs = read_inputs(config, err);
    const auto weights = resolve_weights(config, inputs.population.classes());
    const double half_width = hoeffding_half_width(n_reps, config.tail_bound);

    Report report;
    report.columns = {"aggregate", "weights", "delta", "geo_score", "worse",
                      "replicates", "seed", "half_width"};
    for (const auto& profile : inputs.profiles) {
        for (const auto& w : weights) {
            const auto est =
                geometric_score(profile, inputs.population, w, {n_reps, seed, config.threads});
            report.rows.push_back({{est.aggregate_id}, {est.weights_preset}, {est.delta_value},
                                   {est.geo_score}, {est.worse_count}, {est.replicates},
                                   {est.master_seed}, {half_width}});
        }
    }
    emit(report, config, out);
    return kOk;
}

ClassScoreScale resolve_scale(const RunConfig& config, std::size_t classes) {
    if (config.scale.empty()) {
        if (classes != 5) {
            throw ContractViolation("the default score scale has 5 classes; pass --scale");
        }
        return ClassScoreScale::vqr();
    }
    std::vector<double> scores;
    std::stringstream ss(config.scale);
    std::string field;
    while (std::getline(ss, field, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != field.size()) {
            throw ValidationError("cannot parse class score '" + field + "'");
        }
        scores.push_back(v);
    }
    if (scores.size() != classes) {
        throw ContractViolation("--scale has " + std::to_string(scores.size()) +
                                " entries; the data has " + std::to_string(classes) + " classes");
    }
    return ClassScoreScale(std::move(scores));
}

int cmd_rank(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto seed = require_seed(config);
    const auto n_reps = resolve_replicates(config);
    const auto inputs = read_inputs(config, err);
    const auto weights = resolve_weights(config, inputs.population.classes());
    const auto scale = resolve_scale(config, inputs.population.classes());
    const auto denominator = config.r_denominator == "area" ? RDenominator::area
                                                            : RDenominator::stratum_weighted;

    std::vector<double> r;
    for (const auto& p : inputs.profiles) {
        r.push_back(r_score(p, inputs.population, scale, denominator));
    }
    // One ranking per preset, joined on aggregate id; all share the R ordering.
    std::vector<RankTable> tables;
    for (const auto& w : weights) {
        std::vector<ScoreEstimate> estimates;
        for (const auto& p : inputs.profiles) {
            estimates.push_back(
                geometric_score(p, inputs.population, w, {n_reps, seed, config.threads}));
        }
        tables.push_back(rank(estimates, r));
    }

    Report report;
    report.columns = {"aggregate", "R", "R_rank"};
    for (const auto& w : weights) {
        report.columns.push_back("geo_score_" + w.label());
        report.columns.push_back("geo_rank_" + w.label());
        report.columns.push_back("delta_" + w.label());
    }
    for (std::size_t i = 0; i < tables.front().rows.size(); ++i) {
        const auto& base = tables.front().rows[i];
        std::vector<Cell> cells{{base.aggregate_id}, {base.r}, {std::int64_t{base.r_rank}}};
        for (const auto& t : tables) {
            const auto& row = t.rows[i];
            cells.push_back({row.geo_score});
            cells.push_back({std::int64_t{row.geo_rank}});
            cells.push_back({row.delta_value});
        }
        report.rows.push_back(std::move(cells));
    }
    emit(report, config, out);
    return kOk;
}

int cmd_nreps(const RunConfig& config, std::ostream& out, std::ostream&) {
    const auto n = hoeffding_replicates(config.epsilon, config.tail_bound);
    Report report;
    report.columns = {"epsilon", "tail_bound", "replicates", "achieved_bound"};
    report.rows.push_back({{config.epsilon}, {config.tail_bound}, {n},
                           {hoeffding_bound(n, config.epsilon)}});
    emit(report, config, out);
    return kOk;
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream&) {
    require_readable(config.population_path, "population");
    std::ifstream in(config.population_path);
    auto load = read_population(in, config.population_path, TotalsPolicy::counts);
    const auto& pop = load.population;

    out << "population " << config.population_path << ": area " << pop.area_id() << ", "
        << pop.strata().size() << " strata, " << pop.classes() << " classes\n";
    for (const auto& issue : load.issues) out << "integrity: " << issue.describe() << "\n";
    bool clean = load.issues.empty();
    if (clean) out << "population: all row sums match expected totals\n";

    if (!config.profiles_path.empty()) {
        require_readable(config.profiles_path, "profiles");
        auto profiles = load_profiles_file(config.profiles_path, pop);
        if (!config.outcomes_path.empty()) {
            require_readable(config.outcomes_path, "outcomes");
            attach_outcomes(load_outcomes_file(config.outcomes_path), pop, profiles);
        }
        for (const auto& p : profiles) {
            out << "profile " << p.aggregate_id << ": ok (" << p.total_demand() << " products, "
                << p.demand.size() << " strata" << (p.observed ? ", outcome attached" : "")
                << ")\n";
        }
    }
    if (!clean && config.accept_inconsistent_totals) {
        out << "accepted " << load.issues.size()
            << " inconsistent row(s): class counts define the sampling universe\n";
        return kOk;
    }
    out << (clean ? "valid\n" : "invalid\n");
    return clean ? kOk : kDataError;
}

unsigned default_threads() {
    if (const char* env = std::getenv("GEOSCORE_THREADS")) {
        unsigned v = 0;
        const std::string_view s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
    }
    return 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    config.threads = default_threads();

    CLI::App app{"Geometric scoring and ranking of ordinal assessment outcomes"};
    app.name("geoscore");
    app.require_subcommand(1);

    auto add_inputs = [&](CLI::App* sub, bool population, bool profiles, bool outcomes) {
        if (population) {
            sub->add_option("--population", config.population_path,
                            "population CSV (area,stratum,expected_total,count_*)");
        }
        if (profiles) {
            sub->add_option("--profiles", config.profiles_path,
                            "profiles CSV (aggregate,stratum,demand)");
        }
        if (outcomes) {
            sub->add_option("--outcomes", config.outcomes_path, "outcomes CSV (aggregate,count_*)");
        }
        if (population) {
            sub->add_flag("--accept-inconsistent-totals", config.accept_inconsistent_totals,
                          "load strata whose counts disagree with expected_total (warns)");
        }
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--format", config.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output,-o", config.output_path, "write the report here");
    };
    auto add_weights = [&](CLI::App* sub) {
        sub->add_option("--weights", config.weights,
                        "preset A|B|C or a comma list such as 1,1,1.5,1 (repeatable)");
    };
    auto add_scoring = [&](CLI::App* sub) {
        sub->add_option("--replicates", config.replicates, "replicate count or 'auto'");
        sub->add_option("--epsilon", config.epsilon, "Hoeffding deviation (auto replicates)");
        sub->add_option("--tail-bound", config.tail_bound, "Hoeffding tail probability");
        sub->add_option("--seed", config.seed, "master seed (required)");
        sub->add_option("--threads", config.threads, "worker threads (env GEOSCORE_THREADS)")
            ->check(CLI::PositiveNumber);
    };

    auto* delta_cmd = app.add_subcommand("delta", "delta of each observed outcome per preset");
    add_inputs(delta_cmd, false, false, true);
    add_weights(delta_cmd);
    add_output(delta_cmd);

    auto* score_cmd = app.add_subcommand("score", "Monte-Carlo geometric score per aggregate");
    add_inputs(score_cmd, true, true, true);
    add_weights(score_cmd);
    add_scoring(score_cmd);
    add_output(score_cmd);

    auto* rank_cmd = app.add_subcommand("rank", "R score and geometric-score rankings");
    add_inputs(rank_cmd, true, true, true);
    add_weights(rank_cmd);
    add_scoring(rank_cmd);
    rank_cmd->add_option("--r-denominator", config.r_denominator, "stratum-weighted or area")
        ->check(CLI::IsMember({"stratum-weighted", "area"}));
    rank_cmd->add_option("--scale", config.scale, "class scores, best first (default VQR)");
    add_output(rank_cmd);

    auto* nreps_cmd = app.add_subcommand("nreps", "replicates needed for a Hoeffding guarantee");
    nreps_cmd->add_option("--epsilon", config.epsilon, "deviation");
    nreps_cmd->add_option("--tail-bound", config.tail_bound, "tail probability");
    add_output(nreps_cmd);

    auto* validate_cmd = app.add_subcommand("validate", "integrity check of the input files");
    add_inputs(validate_cmd, true, true, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*delta_cmd) return cmd_delta(config, out, err);
        if (*score_cmd) return cmd_score(config, out, err);
        if (*rank_cmd) return cmd_rank(config, out, err);
        if (*nreps_cmd) return cmd_nreps(config, out, err);
        if (*validate_cmd) return cmd_validate(config, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const ContractViolation& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kUsageError;
}

}  // namespace geoscore::cli
