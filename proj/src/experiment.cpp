#include "warpbo/experiment.hpp"

#include "warpbo/benchmarks.hpp"
#include "warpbo/external_objective.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace warpbo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("config: field \"" + field + "\" " + why);
}

const json& require_field(const json& doc, const char* field) {
    if (!doc.contains(field)) bad_field(field, "is required");
    return doc.at(field);
}

double number_field(const json& doc, const char* field, double fallback) {
    if (!doc.contains(field)) return fallback;
    if (!doc.at(field).is_number()) bad_field(field, "must be a number");
    return doc.at(field).get<double>();
}

int int_field(const json& doc, const char* field, int fallback) {
    if (!doc.contains(field)) return fallback;
    if (!doc.at(field).is_number_integer()) bad_field(field, "must be an integer");
    return doc.at(field).get<int>();
}

std::string string_field(const json& doc, const char* field, const std::string& fallback) {
    if (!doc.contains(field)) return fallback;
    if (!doc.at(field).is_string()) bad_field(field, "must be a string");
    return doc.at(field).get<std::string>();
}

Box parse_bounds(const json& doc) {
    const json& bounds = require_field(doc, "bounds");
    if (!bounds.is_array() || bounds.empty()) bad_field("bounds", "must be a non-empty array");
    std::vector<std::pair<double, double>> pairs;
    for (const auto& entry : bounds) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
            !entry[1].is_number()) {
            bad_field("bounds", "entries must be [lo, hi] number pairs");
        }
        pairs.emplace_back(entry[0].get<double>(), entry[1].get<double>());
    }
    try {
        return Box::from_bounds(pairs);
    } catch (const std::invalid_argument& e) {
        bad_field("bounds", e.what());
    }
}

PriorSpec parse_prior(const json& entry, const Box& space, std::size_t m) {
    const double a = space.lo[static_cast<Eigen::Index>(m)];
    const double b = space.hi[static_cast<Eigen::Index>(m)];
    if (entry.is_string() && entry.get<std::string>() == "uniform") {
        return PriorSpec::uniform(a, b);
    }
    if (!entry.is_object()) bad_field("priors", "entries must be \"uniform\" or objects");
    const std::string kind = string_field(entry, "kind", "");
    try {
        if (kind == "uniform") return PriorSpec::uniform(a, b);
        if (kind == "truncated_normal") {
            if (!entry.contains("mu") || !entry.contains("sigma")) {
                bad_field("priors", "truncated_normal entries need mu and sigma");
            }
            return PriorSpec::truncated_normal(a, b, number_field(entry, "mu", 0.0),
                                               number_field(entry, "sigma", 1.0));
        }
        if (kind == "truncated_gamma") {
            if (!entry.contains("alpha") || !entry.contains("beta")) {
                bad_field("priors", "truncated_gamma entries need alpha and beta");
            }
            return PriorSpec::truncated_gamma(a, b, number_field(entry, "alpha", 1.0),
                                              number_field(entry, "beta", 1.0));
        }
    } catch (const std::invalid_argument& e) {
        bad_field("priors", std::string("dimension ") + std::to_string(m) + ": " + e.what());
    }
    bad_field("priors", "kind must be uniform, truncated_normal, or truncated_gamma");
}

WarpMap parse_priors(const json& doc, const Box& space) {
    if (!doc.contains("priors")) return WarpMap::all_uniform(space);
    const json& priors = doc.at("priors");
    if (priors.is_string()) {
        if (priors.get<std::string>() != "uniform") {
            bad_field("priors", "string form must be \"uniform\"");
        }
        return WarpMap::all_uniform(space);
    }
    if (!priors.is_array()) bad_field("priors", "must be \"uniform\" or an array");
    if (static_cast<int>(priors.size()) != space.dim()) {
        bad_field("priors", "length " + std::to_string(priors.size()) +
                                " does not match bounds length " + std::to_string(space.dim()));
    }
    WarpMap warp;
    for (std::size_t m = 0; m < priors.size(); ++m) {
        warp.dims.push_back(parse_prior(priors[m], space, m));
    }
    return warp;
}

Method parse_method(const std::string& name) {
    if (name == "warped_bo") return Method::WarpedBo;
    if (name == "standard_bo") return Method::StandardBo;
    if (name == "prior_search") return Method::PriorSearch;
    bad_field("methods", "unknown method \"" + name +
                             "\" (expected warped_bo, standard_bo, or prior_search)");
}

std::vector<Method> parse_methods(const json& doc) {
    if (!doc.contains("methods")) {
        return {Method::WarpedBo, Method::StandardBo, Method::PriorSearch};
    }
    const json& methods = doc.at("methods");
    if (!methods.is_array() || methods.empty()) {
        bad_field("methods", "must be a non-empty array");
    }
    std::vector<Method> out;
    for (const auto& entry : methods) {
        if (!entry.is_string()) bad_field("methods", "entries must be strings");
        const Method m = parse_method(entry.get<std::string>());
        if (std::find(out.begin(), out.end(), m) != out.end()) {
            bad_field("methods", "duplicate entry \"" + method_name(m) + "\"");
        }
        out.push_back(m);
    }
    return out;
}

AcquisitionSpec parse_acquisition(const json& doc, const Box& space) {
    AcquisitionSpec spec;
    spec.ucb_r = space.longest_side();
    if (!doc.contains("acquisition")) return spec;
    const json& acq = doc.at("acquisition");
    if (!acq.is_object()) bad_field("acquisition", "must be an object");
    const std::string kind = string_field(acq, "kind", "ei");
    if (kind == "ei") {
        spec.kind = AcquisitionKind::ExpectedImprovement;
    } else if (kind == "ucb") {
        spec.kind = AcquisitionKind::Ucb;
    } else {
        bad_field("acquisition", "kind must be \"ei\" or \"ucb\"");
    }
    spec.delta = number_field(acq, "delta", spec.delta);
    const std::string mode = string_field(acq, "ucb_mode", "simplified");
    if (mode == "simplified") {
        spec.ucb_mode = UcbMode::Simplified;
    } else if (mode == "paper_formula") {
        spec.ucb_mode = UcbMode::PaperFormula;
    } else {
        bad_field("acquisition", "ucb_mode must be \"simplified\" or \"paper_formula\"");
    }
    spec.ucb_a = number_field(acq, "a", spec.ucb_a);
    spec.ucb_b = number_field(acq, "b", spec.ucb_b);
    spec.ucb_r = number_field(acq, "r", spec.ucb_r);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        bad_field("acquisition", e.what());
    }
    return spec;
}

json prior_to_json(const PriorSpec& prior) {
    switch (prior.kind) {
    case PriorKind::Uniform:
        return {{"kind", "uniform"}};
    case PriorKind::TruncatedNormal:
        return {{"kind", "truncated_normal"}, {"mu", prior.mu}, {"sigma", prior.sigma}};
    case PriorKind::TruncatedGamma:
        return {{"kind", "truncated_gamma"}, {"alpha", prior.alpha}, {"beta", prior.beta}};
    }
    throw std::logic_error("prior_to_json: unreachable");
}

struct Cell {
    Method method;
    int run_index = 0;
};

struct CellOutcome {
    RunResult result;
    std::optional<std::string> failure; // set when the cell threw
};

CellOutcome run_cell(const ExperimentConfig& config, const Cell& cell) {
    CellOutcome outcome;
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(cell.run_index);
    try {
        Rng design_rng(seed);
        const std::vector<Eigen::VectorXd> design =
            initial_design(config.space, config.n_init, design_rng);
        const BoConfig bo = config.bo_config(seed);

        std::optional<ExternalObjective> child;
        Objective objective;
        if (!config.external_command.empty()) {
            child.emplace(config.external_command, config.external_timeout_seconds);
            objective = [&child](const Eigen::VectorXd& x) { return (*child)(x); };
        } else {
            objective = find_benchmark(config.objective_name)->fn;
        }

        switch (cell.method) {
        case Method::WarpedBo:
            outcome.result = run_bo(objective, config.space, config.priors, bo, &design);
            break;
        case Method::StandardBo:
            // Uniform priors over the box: the GP runs on normalised
            // coordinates, the scale the lengthscale grid is calibrated for.
            outcome.result =
                run_bo(objective, config.space, WarpMap::all_uniform(config.space), bo, &design);
            break;
        case Method::PriorSearch:
            outcome.result = run_prior_search(objective, config.space, config.priors, bo,
                                              &design);
            break;
        }
        if (outcome.result.error) outcome.failure = *outcome.result.error;
    } catch (const std::exception& e) {
        outcome.failure = e.what();
    }
    return outcome;
}

} // namespace

std::string method_name(Method method) {
    switch (method) {
    case Method::WarpedBo: return "warped_bo";
    case Method::StandardBo: return "standard_bo";
    case Method::PriorSearch: return "prior_search";
    }
    throw std::logic_error("method_name: unreachable");
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
    ExperimentConfig config;

    const json& objective = require_field(doc, "objective");
    if (objective.is_string()) {
        config.objective_name = objective.get<std::string>();
        if (find_benchmark(config.objective_name) == nullptr) {
            std::string known;
            for (const auto& b : benchmarks()) known += " " + b.name;
            bad_field("objective", "unknown builtin \"" + config.objective_name +
                                       "\" (known:" + known + ")");
        }
    } else if (objective.is_object() && objective.contains("external")) {
        if (!objective.at("external").is_string() ||
            objective.at("external").get<std::string>().empty()) {
            bad_field("objective", "\"external\" must be a non-empty command string");
        }
        config.external_command = objective.at("external").get<std::string>();
        config.external_timeout_seconds =
            number_field(objective, "timeout_seconds", config.external_timeout_seconds);
        if (!(config.external_timeout_seconds > 0.0)) {
            bad_field("objective", "\"timeout_seconds\" must be > 0");
        }
    } else {
        bad_field("objective", "must be a builtin name or {\"external\": command}");
    }

    config.space = parse_bounds(doc);
    if (!config.objective_name.empty()) {
        const Benchmark* bench = find_benchmark(config.objective_name);
        if (bench->dim != config.space.dim()) {
            bad_field("bounds", "length " + std::to_string(config.space.dim()) +
                                    " does not match objective dimension " +
                                    std::to_string(bench->dim));
        }
    }
    config.priors = parse_priors(doc, config.space);
    config.methods = parse_methods(doc);
    config.acquisition = parse_acquisition(doc, config.space);

    config.n_init = int_field(doc, "n_init", config.n_init);
    config.budget = int_field(doc, "budget", 0);
    if (!doc.contains("budget")) bad_field("budget", "is required");
    config.runs = int_field(doc, "runs", config.runs);
    if (doc.contains("base_seed")) {
        if (!doc.at("base_seed").is_number_integer()) {
            bad_field("base_seed", "must be an integer");
        }
        const auto raw_seed = doc.at("base_seed").get<long long>();
        if (raw_seed < 0) bad_field("base_seed", "must be >= 0");
        config.base_seed = static_cast<std::uint64_t>(raw_seed);
    }

    const std::string direction = string_field(doc, "direction", "minimize");
    if (direction == "minimize") {
        config.direction = Direction::Minimize;
    } else if (direction == "maximize") {
        config.direction = Direction::Maximize;
    } else {
        bad_field("direction", "must be \"minimize\" or \"maximize\"");
    }
    config.output_dir = string_field(doc, "output_dir", config.output_dir);

    if (doc.contains("maximizer")) {
        const json& m = doc.at("maximizer");
        if (!m.is_object()) bad_field("maximizer", "must be an object");
        config.maximizer_budget.candidates =
            int_field(m, "candidates", config.maximizer_budget.candidates);
        config.maximizer_budget.restarts =
            int_field(m, "restarts", config.maximizer_budget.restarts);
        config.maximizer_budget.max_iterations =
            int_field(m, "max_iterations", config.maximizer_budget.max_iterations);
    }
    config.noise_var = number_field(doc, "noise_var", config.noise_var);
    config.refit_every = int_field(doc, "refit_every", config.refit_every);

    config.validate();
    return config;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: \"" + path + "\" is not valid JSON: " + e.what());
    }
    return from_json(doc);
}

json ExperimentConfig::to_json() const {
    json doc;
    if (external_command.empty()) {
        doc["objective"] = objective_name;
    } else {
        doc["objective"] = {{"external", external_command},
                            {"timeout_seconds", external_timeout_seconds}};
    }
    json bounds = json::array();
    for (Eigen::Index m = 0; m < space.lo.size(); ++m) {
        bounds.push_back({space.lo[m], space.hi[m]});
    }
    doc["bounds"] = bounds;
    json priors_json = json::array();
    for (const auto& prior : priors.dims) priors_json.push_back(prior_to_json(prior));
    doc["priors"] = priors_json;
    json methods_json = json::array();
    for (Method m : methods) methods_json.push_back(method_name(m));
    doc["methods"] = methods_json;
    doc["acquisition"] = {
        {"kind", acquisition.kind == AcquisitionKind::ExpectedImprovement ? "ei" : "ucb"},
        {"delta", acquisition.delta},
        {"ucb_mode", acquisition.ucb_mode == UcbMode::Simplified ? "simplified"
                                                                 : "paper_formula"},
        {"a", acquisition.ucb_a},
        {"b", acquisition.ucb_b},
        {"r", acquisition.ucb_r}};
    doc["n_init"] = n_init;
    doc["budget"] = budget;
    doc["runs"] = runs;
    doc["base_seed"] = base_seed;
    doc["direction"] = direction == Direction::Minimize ? "minimize" : "maximize";
    doc["output_dir"] = output_dir;
    doc["maximizer"] = {{"candidates", maximizer_budget.candidates},
                        {"restarts", maximizer_budget.restarts},
                        {"max_iterations", maximizer_budget.max_iterations}};
    doc["noise_var"] = noise_var;
    doc["refit_every"] = refit_every;
    return doc;
}

BoConfig ExperimentConfig::bo_config(std::uint64_t seed) const {
    BoConfig bo;
    bo.n_init = n_init;
    bo.budget = budget;
    bo.acquisition = acquisition;
    bo.direction = direction;
    bo.seed = seed;
    bo.maximizer_budget = maximizer_budget;
    bo.noise_var = noise_var;
    bo.refit_every = refit_every;
    return bo;
}

void ExperimentConfig::validate() const {
    if (objective_name.empty() == external_command.empty()) {
        bad_field("objective", "must be exactly one of builtin name or external command");
    }
    if (static_cast<int>(priors.dims.size()) != space.dim()) {
        bad_field("priors", "length does not match bounds length");
    }
    if (!priors.spans(space)) {
        bad_field("priors", "supports must coincide with the bounds");
    }
    if (methods.empty()) bad_field("methods", "must be non-empty");
    if (runs < 1) bad_field("runs", "must be >= 1");
    if (output_dir.empty()) bad_field("output_dir", "must be non-empty");
    try {
        bo_config(base_seed).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::vector<AggregateRow> aggregate(const std::vector<std::vector<TraceRecord>>& traces) {
    if (traces.empty()) throw std::invalid_argument("aggregate: no traces");
    const std::size_t length = traces.front().size();
    for (const auto& trace : traces) {
        if (trace.size() != length) {
            throw std::invalid_argument("aggregate: traces have different lengths");
        }
    }
    const auto runs = static_cast<double>(traces.size());
    std::vector<AggregateRow> rows;
    rows.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        double mean = 0.0;
        for (const auto& trace : traces) mean += trace[i].best;
        mean /= runs;
        double stderr_best = 0.0;
        if (traces.size() > 1) {
            double ss = 0.0;
            for (const auto& trace : traces) {
                const double d = trace[i].best - mean;
                ss += d * d;
            }
            stderr_best = std::sqrt(ss / (runs - 1.0)) / std::sqrt(runs);
        }
        rows.push_back({static_cast<int>(i), mean, stderr_best});
    }
    return rows;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file \"" + path + "\"");
    const Eigen::Index d = trace.empty() ? 0 : trace.front().point.size();
    out << "iter";
    for (Eigen::Index m = 0; m < d; ++m) out << ",x_" << m;
    out << ",y,best\n";
    for (const auto& record : trace) {
        out << record.iteration;
        for (Eigen::Index m = 0; m < d; ++m) out << ',' << fmt_double(record.point[m]);
        out << ',' << fmt_double(record.value) << ',' << fmt_double(record.best) << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing \"" + path + "\"");
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file \"" + path + "\"");
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("trace file \"" + path + "\" is empty");
    }
    const auto columns = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',')) + 1;
    const Eigen::Index d = columns - 3;
    if (d < 1 || line.rfind("iter,", 0) != 0) {
        throw std::runtime_error("trace file \"" + path + "\" has an unexpected header");
    }
    std::vector<TraceRecord> trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> fields;
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::string cell =
                line.substr(start, comma == std::string::npos ? std::string::npos
                                                              : comma - start);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                throw std::runtime_error("trace file \"" + path +
                                         "\" has a malformed cell \"" + cell + "\"");
            }
            fields.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (static_cast<Eigen::Index>(fields.size()) != columns) {
            throw std::runtime_error("trace file \"" + path + "\" has a malformed row");
        }
        TraceRecord record;
        record.iteration = static_cast<int>(fields[0]);
        record.point = Eigen::Map<Eigen::VectorXd>(fields.data() + 1, d);
        record.value = fields[static_cast<std::size_t>(columns) - 2];
        record.best = fields[static_cast<std::size_t>(columns) - 1];
        trace.push_back(std::move(record));
    }
    return trace;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write aggregate file \"" + path + "\"");
    out << "iter,mean_best,stderr_best\n";
    for (const auto& row : rows) {
        out << row.iteration << ',' << fmt_double(row.mean_best) << ','
            << fmt_double(row.stderr_best) << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing \"" + path + "\"");
}

int run_experiment(const ExperimentConfig& config, int jobs) {
    config.validate();
    if (jobs < 1) jobs = 1;
    fs::create_directories(config.output_dir);
    {
        std::ofstream echo(fs::path(config.output_dir) / "config_echo.json");
        echo << config.to_json().dump(2) << '\n';
    }

    std::vector<Cell> cells;
    for (int i = 0; i < config.runs; ++i) {
        for (Method m : config.methods) cells.push_back({m, i});
    }
    std::vector<CellOutcome> outcomes(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t index = next.fetch_add(1);
            if (index >= cells.size()) return;
            outcomes[index] = run_cell(config, cells[index]);
        }
    };
    const int thread_count = std::min<int>(jobs, static_cast<int>(cells.size()));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<std::string> failures;
    std::map<Method, std::vector<std::vector<TraceRecord>>> per_method;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& cell = cells[i];
        const CellOutcome& outcome = outcomes[i];
        const std::uint64_t seed =
            config.base_seed + static_cast<std::uint64_t>(cell.run_index);
        const std::string label =
            "(" + method_name(cell.method) + ", seed " + std::to_string(seed) + ")";
        if (!outcome.result.trace.empty()) {
            const fs::path path = fs::path(config.output_dir) /
                                  (method_name(cell.method) + "_seed" + std::to_string(seed) +
                                   ".csv");
            write_trace_csv(path.string(), outcome.result.trace);
        }
        if (outcome.failure) {
            failures.push_back(label + ": " + *outcome.failure);
        } else {
            per_method[cell.method].push_back(outcome.result.trace);
        }
    }

    for (const auto& [method, traces] : per_method) {
        if (static_cast<int>(traces.size()) != config.runs) continue;
        const fs::path path =
            fs::path(config.output_dir) / (method_name(method) + "_aggregate.csv");
        write_aggregate_csv(path.string(), aggregate(traces));
    }

    for (const auto& failure : failures) std::cerr << "run failed " << failure << '\n';
    std::cout << "wrote " << (cells.size() - failures.size()) << "/" << cells.size()
              << " runs to " << config.output_dir << '\n';
    return failures.empty() ? 0 : 2;
}

int aggregate_directory(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        std::cerr << "aggregate: \"" << dir << "\" is not a directory\n";
        return 1;
    }
    std::map<std::string, std::vector<fs::path>> groups;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        const std::string stem = entry.path().stem().string();
        const std::size_t tag = stem.rfind("_seed");
        if (tag == std::string::npos) continue;
        const std::string suffix = stem.substr(tag + 5);
        if (suffix.empty() ||
            suffix.find_first_not_of("0123456789") != std::string::npos) {
            continue;
        }
        groups[stem.substr(0, tag)].push_back(entry.path());
    }
    if (groups.empty()) {
        std::cerr << "aggregate: no <method>_seed<seed>.csv traces in \"" << dir << "\"\n";
        return 1;
    }
    for (auto& [method, paths] : groups) {
        std::sort(paths.begin(), paths.end());
        std::vector<std::vector<TraceRecord>> traces;
        traces.reserve(paths.size());
        for (const auto& path : paths) traces.push_back(read_trace_csv(path.string()));
        try {
            const fs::path out = fs::path(dir) / (method + "_aggregate.csv");
            write_aggregate_csv(out.string(), aggregate(traces));
            std::cout << "wrote " << out.string() << " (" << traces.size() << " runs)\n";
        } catch (const std::invalid_argument& e) {
            std::cerr << "aggregate: " << method << ": " << e.what() << '\n';
            return 1;
        }
    }
    return 0;
}

} // namespace warpbo
