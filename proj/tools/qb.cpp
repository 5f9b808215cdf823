// Command-line front end: generate synthetic posterior samples, run the
// quotient-space barycenter algorithms and the pivot baseline, compare the
// two, and drive the multi-reference alignment pipeline.
//
// Exit codes: 0 success, 2 invalid configuration or malformed input,
// 3 I/O failure.

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qb/baselines.hpp"
#include "qb/barycenter.hpp"
#include "qb/errors.hpp"
#include "qb/io.hpp"
#include "qb/log.hpp"
#include "qb/samplers.hpp"

namespace {

using qb::Json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

qb::GroupSpec parse_group(const std::string& name, int degree) {
    if (name == "sym") return qb::GroupSpec{qb::GroupKind::Symmetric, degree};
    if (name == "cyc") return qb::GroupSpec{qb::GroupKind::Cyclic, degree};
    if (name == "none") return qb::GroupSpec{qb::GroupKind::Trivial, degree};
    throw qb::ConfigError("unknown group '" + name + "' (expected sym, cyc or none)");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw qb::ConfigError(what + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw qb::ConfigError(what + ": empty list");
    return out;
}

std::vector<long> parse_long_list(const std::string& text, const std::string& what) {
    std::vector<long> out;
    for (const double v : parse_double_list(text, what)) {
        const long n = static_cast<long>(v);
        if (static_cast<double>(n) != v) throw qb::ConfigError(what + ": expected integers");
        out.push_back(n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Named scenarios

struct NamedScenario {
    bool gaussian = false;
    qb::GmmScenario gmm;
    qb::MeanTupleScenario mean;
};

NamedScenario scenario_by_name(const std::string& name, std::uint64_t seed,
                               const qb::KvConfig& cfg) {
    NamedScenario out;
    if (name == "gmm5") {
        out.gaussian = true;
        out.gmm = qb::gmm5_scenario(seed, cfg.get_double("scenario.jitter", 0.05));
    } else if (name == "ellipse") {
        out.gaussian = true;
        out.gmm = qb::ellipse_scenario(seed);
        out.gmm.jitter_mean_std = cfg.get_double("scenario.jitter_mean", out.gmm.jitter_mean_std);
        out.gmm.jitter_cov_log_std =
            cfg.get_double("scenario.jitter_cov", out.gmm.jitter_cov_log_std);
    } else if (name == "means1d") {
        out.gaussian = false;
        out.mean = qb::means1d_scenario(seed, cfg.get_double("scenario.jitter", 0.5));
    } else {
        throw qb::ConfigError("unknown scenario '" + name +
                              "' (expected gmm5, ellipse or means1d)");
    }
    return out;
}

qb::GroupSpec scenario_group(const NamedScenario& s) {
    return s.gaussian ? s.gmm.group : s.mean.group;
}

// ---------------------------------------------------------------------------
// Serialization helpers

Json vector_to_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json upper_triangle_to_json(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index s = r; s < m.cols(); ++s) out.push_back(m(r, s));
    }
    return out;
}

Json estimate_to_json(const qb::ProductPoint& estimate) {
    Json out = Json::array();
    for (const auto& f : estimate) out.push_back(vector_to_json(f));
    return out;
}

Json estimate_to_json(const qb::GaussianTuple& estimate) {
    Json out = Json::array();
    for (const auto& c : estimate) {
        out.push_back(Json{{"mean", vector_to_json(c.mean)},
                           {"cov_upper", upper_triangle_to_json(c.covariance)}});
    }
    return out;
}

Json trace_to_json(const std::vector<std::pair<long, double>>& trace) {
    Json iters = Json::array();
    Json values = Json::array();
    for (const auto& [t, v] : trace) {
        iters.push_back(t);
        values.push_back(v);
    }
    return Json{{"iteration", iters}, {"objective", values}};
}

Json base_record(const std::string& command, const qb::KvConfig& cfg) {
    return Json{{"schema", qb::kResultSchemaVersion},
                {"command", command},
                {"config", cfg.to_json()}};
}

// ---------------------------------------------------------------------------
// Accuracy against a known ground truth, after optimal matching

struct MatchedErrors {
    std::vector<double> mean_err;
    std::vector<double> cov_err;
    double mean_max = 0.0;
    double cov_sum = 0.0;
};

MatchedErrors matched_errors(const qb::GaussianTuple& estimate, const qb::GaussianTuple& truth) {
    const qb::GaussianManifold gm(truth.front().dim());
    const auto alignment = qb::align_symmetric(gm, qb::to_product_point(gm, truth),
                                               qb::to_product_point(gm, estimate));
    MatchedErrors out;
    for (int i = 0; i < alignment.element.degree(); ++i) {
        const auto& est = estimate[static_cast<std::size_t>(alignment.element(i))];
        const auto& tru = truth[static_cast<std::size_t>(i)];
        out.mean_err.push_back((est.mean - tru.mean).norm());
        out.cov_err.push_back((est.covariance - tru.covariance).norm());
        out.mean_max = std::max(out.mean_max, out.mean_err.back());
        out.cov_sum += out.cov_err.back();
    }
    return out;
}

MatchedErrors matched_errors(const qb::ProductPoint& estimate, const qb::ProductPoint& truth) {
    const qb::EuclideanManifold factor(truth.front().size());
    const auto alignment = qb::align_symmetric(factor, truth, estimate);
    MatchedErrors out;
    for (int i = 0; i < alignment.element.degree(); ++i) {
        const auto& est = estimate[static_cast<std::size_t>(alignment.element(i))];
        out.mean_err.push_back((est - truth[static_cast<std::size_t>(i)]).norm());
        out.cov_err.push_back(0.0);
        out.mean_max = std::max(out.mean_max, out.mean_err.back());
    }
    return out;
}

Json errors_to_json(const MatchedErrors& e) {
    return Json{{"mean_error_per_component", e.mean_err},
                {"cov_error_per_component", e.cov_err},
                {"mean_error_max", e.mean_max},
                {"cov_error_sum", e.cov_sum}};
}

// ---------------------------------------------------------------------------
// Commands

void require_out(const qb::KvConfig& cfg) {
    if (cfg.get_string("out", "").empty()) {
        throw qb::ConfigError("missing output path (--out or key 'out')");
    }
}

int cmd_gen(qb::KvConfig& cfg) {
    require_out(cfg);
    const std::string name = cfg.get_string("gen.scenario", "");
    if (name.empty()) throw qb::ConfigError("gen: missing scenario (--scenario)");
    const long n = cfg.get_long("gen.n", 0);
    if (n < 1) throw qb::ConfigError("gen: sample count must be >= 1 (--n)");
    const std::uint64_t seed = cfg.get_u64("seed", 7);
    cfg.set("seed", std::to_string(seed));
    cfg.set("gen.n", std::to_string(n));

    NamedScenario scenario = scenario_by_name(name, seed, cfg);
    if (cfg.has("group")) {
        const auto g = parse_group(cfg.get_string("group", "sym"), scenario_group(scenario).degree);
        (scenario.gaussian ? scenario.gmm.group : scenario.mean.group) = g;
    }

    if (scenario.gaussian) {
        qb::GmmStream stream(scenario.gmm);
        std::vector<qb::GaussianTuple> samples;
        samples.reserve(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) samples.push_back(*stream.next());
        qb::write_gaussian_samples(cfg.get_string("out", ""), samples);
    } else {
        qb::MeanTupleStream stream(scenario.mean);
        std::vector<qb::ProductPoint> samples;
        samples.reserve(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) samples.push_back(*stream.next());
        qb::write_mean_samples(cfg.get_string("out", ""), samples);
    }
    return kExitOk;
}

qb::SgdConfig sgd_config_from(const qb::KvConfig& cfg) {
    qb::SgdConfig out;
    out.iterations = cfg.get_long("sgd.iters", 2000);
    out.seed = cfg.get_u64("seed", 7);
    out.trace_every = cfg.get_long("sgd.trace_every", 100);
    out.eval_set_size = static_cast<int>(cfg.get_long("sgd.eval_set", 256));
    out.tail_average = cfg.get_long("sgd.tail_average", 0) != 0;
    out.schedule.scale = cfg.get_double("sgd.step_scale", 1.0);
    out.schedule.offset = cfg.get_long("sgd.step_offset", 0);
    out.schedule.kind =
        out.schedule.offset > 0 ? qb::ScheduleKind::ShiftedHarmonic : qb::ScheduleKind::Harmonic;
    out.validate();
    return out;
}

void echo_sgd_config(qb::KvConfig& cfg, const qb::SgdConfig& sgd) {
    cfg.set("sgd.iters", std::to_string(sgd.iterations));
    cfg.set("sgd.trace_every", std::to_string(sgd.trace_every));
    cfg.set("sgd.eval_set", std::to_string(sgd.eval_set_size));
    cfg.set("sgd.tail_average", sgd.tail_average ? "1" : "0");
    cfg.set("sgd.step_scale", qb::format_double(sgd.schedule.scale));
    cfg.set("sgd.step_offset", std::to_string(sgd.schedule.offset));
    cfg.set("seed", std::to_string(sgd.seed));
}

int cmd_barycenter(qb::KvConfig& cfg) {
    require_out(cfg);
    const std::string in = cfg.get_string("barycenter.in", "");
    if (in.empty()) throw qb::ConfigError("barycenter: missing input sample file (--in)");
    const qb::SampleFile samples = qb::read_samples(in);
    const auto group = parse_group(cfg.get_string("group", "sym"), samples.components);
    cfg.set("group", cfg.get_string("group", "sym"));

    qb::SgdConfig sgd = sgd_config_from(cfg);
    echo_sgd_config(cfg, sgd);

    Json record = base_record("barycenter", cfg);
    if (samples.gaussian) {
        qb::VectorStream<qb::GaussianTuple> stream(samples.gaussian_tuples, /*cycle=*/true);
        const auto report = qb::sgd_gaussian_mixture(stream, group, sgd);
        const qb::GaussianManifold gm(samples.dim);
        const double qd_first = qb::quotient_distance(
            gm, qb::to_product_point(gm, report.estimate),
            qb::to_product_point(gm, samples.gaussian_tuples.front()), group);
        record["estimate"] = estimate_to_json(report.estimate);
        record["trace"] = trace_to_json(report.objective_trace);
        record["metrics"] = Json{{"quotient_dist_to_first_sample", qd_first}};
        record["timing"] = Json{{"wall_time_s", report.wall_time_s}};
        const std::string truth_name = cfg.get_string("barycenter.truth", "");
        if (!truth_name.empty()) {
            const auto truth = scenario_by_name(truth_name, sgd.seed, cfg);
            if (!truth.gaussian) throw qb::ConfigError("barycenter: truth scenario is mean-only");
            record["metrics"].update(errors_to_json(
                matched_errors(report.estimate, truth.gmm.true_components)));
        }
    } else {
        const qb::EuclideanManifold factor(samples.dim);
        qb::VectorStream<qb::ProductPoint> stream(samples.mean_tuples, /*cycle=*/true);
        const auto report = qb::sgd_quotient(stream, factor, group, sgd);
        const double qd_first =
            qb::quotient_distance(factor, report.estimate, samples.mean_tuples.front(), group);
        record["estimate"] = estimate_to_json(report.estimate);
        record["trace"] = trace_to_json(report.objective_trace);
        record["metrics"] = Json{{"quotient_dist_to_first_sample", qd_first}};
        record["timing"] = Json{{"wall_time_s", report.wall_time_s}};
        const std::string truth_name = cfg.get_string("barycenter.truth", "");
        if (!truth_name.empty()) {
            const auto truth = scenario_by_name(truth_name, sgd.seed, cfg);
            if (truth.gaussian) throw qb::ConfigError("barycenter: truth scenario is Gaussian");
            record["metrics"].update(
                errors_to_json(matched_errors(report.estimate, truth.mean.true_tuple)));
        }
    }
    qb::write_results(cfg.get_string("out", ""), {record});
    return kExitOk;
}

qb::PivotChoice pivot_choice_from(const std::string& text, const qb::SampleFile& samples) {
    qb::PivotChoice choice;
    if (text == "map") {
        choice.kind = qb::PivotKind::MapSample;
        if (!samples.log_density.empty()) choice.log_density = samples.log_density;
        return choice;
    }
    if (text == "boundary") {
        choice.kind = qb::PivotKind::Index;
        choice.index = samples.gaussian
                           ? qb::most_degenerate_sample_index(samples.gaussian_tuples)
                           : [&] {
                                 const qb::EuclideanManifold factor(samples.dim);
                                 return qb::most_degenerate_sample_index(factor,
                                                                         samples.mean_tuples);
                             }();
        return choice;
    }
    try {
        std::size_t pos = 0;
        const long idx = std::stol(text, &pos);
        if (pos != text.size() || idx < 0) throw std::invalid_argument(text);
        choice.kind = qb::PivotKind::Index;
        choice.index = static_cast<std::size_t>(idx);
        return choice;
    } catch (const std::exception&) {
        throw qb::ConfigError("pivot: expected 'map', 'boundary' or a sample index, got '" +
                              text + "'");
    }
}

int cmd_pivot(qb::KvConfig& cfg) {
    require_out(cfg);
    const std::string in = cfg.get_string("pivot.in", "");
    if (in.empty()) throw qb::ConfigError("pivot: missing input sample file (--in)");
    const qb::SampleFile samples = qb::read_samples(in);
    const auto group = parse_group(cfg.get_string("group", "sym"), samples.components);
    cfg.set("group", cfg.get_string("group", "sym"));
    const std::string choice_text = cfg.get_string("pivot.choice", "map");
    cfg.set("pivot.choice", choice_text);
    const qb::PivotChoice choice = pivot_choice_from(choice_text, samples);

    Json record = base_record("pivot", cfg);
    const auto start = Clock::now();
    if (samples.gaussian) {
        const std::size_t pivot = qb::pivot_select(samples.gaussian_tuples, choice);
        const auto result = qb::pivot_relabel(samples.gaussian_tuples, pivot, group);
        record["metrics"] = Json{{"pivot_index", pivot}};
        record["estimate"] = estimate_to_json(result.mean);
    } else {
        const qb::EuclideanManifold factor(samples.dim);
        const std::size_t pivot = qb::pivot_select(samples.mean_tuples, choice);
        const auto result = qb::pivot_relabel(factor, samples.mean_tuples, pivot, group);
        record["metrics"] = Json{{"pivot_index", pivot}};
        record["estimate"] = estimate_to_json(result.mean);
    }
    record["timing"] = Json{{"wall_time_s", seconds_since(start)}};
    qb::write_results(cfg.get_string("out", ""), {record});
    return kExitOk;
}

int cmd_compare(qb::KvConfig& cfg) {
    require_out(cfg);
    const std::string scenario_name = cfg.get_string("compare.scenario", "");
    if (scenario_name.empty()) throw qb::ConfigError("compare: missing scenario (--scenario)");
    const std::uint64_t seed = cfg.get_u64("seed", 7);
    cfg.set("seed", std::to_string(seed));
    const std::string methods_text = cfg.get_string("compare.methods", "sgd,pivot");
    cfg.set("compare.methods", methods_text);
    const std::string grid_text = cfg.get_string("compare.grid", "250,500,1000,2000");
    cfg.set("compare.grid", grid_text);
    const std::string pivot_text = cfg.get_string("compare.pivot", "boundary");
    cfg.set("compare.pivot", pivot_text);

    const auto methods = split_list(methods_text);
    if (methods.empty()) throw qb::ConfigError("compare: empty methods list");
    for (const auto& m : methods) {
        if (m == "stephens") throw qb::ConfigError("method 'stephens' unavailable: out of scope");
        if (m != "sgd" && m != "pivot") throw qb::ConfigError("unknown method '" + m + "'");
    }
    const auto grid = parse_long_list(grid_text, "compare: grid");
    for (const long n : grid) {
        if (n < 1) throw qb::ConfigError("compare: sample counts must be >= 1");
    }

    const NamedScenario scenario = scenario_by_name(scenario_name, seed, cfg);
    const qb::GroupSpec group = scenario_group(scenario);

    // One draw set per grid point; both methods see identical draws.
    std::vector<std::vector<qb::GaussianTuple>> gaussian_draws;
    std::vector<std::vector<qb::ProductPoint>> mean_draws;
    const long max_n = *std::max_element(grid.begin(), grid.end());
    if (scenario.gaussian) {
        qb::GmmStream stream(scenario.gmm);
        std::vector<qb::GaussianTuple> all;
        for (long i = 0; i < max_n; ++i) all.push_back(*stream.next());
        for (const long n : grid) {
            gaussian_draws.emplace_back(all.begin(), all.begin() + n);
        }
    } else {
        qb::MeanTupleStream stream(scenario.mean);
        std::vector<qb::ProductPoint> all;
        for (long i = 0; i < max_n; ++i) all.push_back(*stream.next());
        for (const long n : grid) {
            mean_draws.emplace_back(all.begin(), all.begin() + n);
        }
    }

    std::vector<Json> records;
    for (const auto& method : methods) {
        Json curve = Json::array();
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const long n = grid[gi];
            Json point{{"samples", n}};
            if (method == "sgd") {
                qb::SgdConfig sgd = sgd_config_from(cfg);
                sgd.iterations = cfg.has("sgd.iters") ? sgd.iterations : n;
                sgd.eval_set_size = 0;
                if (scenario.gaussian) {
                    qb::VectorStream<qb::GaussianTuple> stream(gaussian_draws[gi], true);
                    const auto report = qb::sgd_gaussian_mixture(stream, group, sgd);
                    point.update(errors_to_json(
                        matched_errors(report.estimate, scenario.gmm.true_components)));
                    point["wall_time_s"] = report.wall_time_s;
                } else {
                    const qb::EuclideanManifold factor(
                        scenario.mean.true_tuple.front().size());
                    qb::VectorStream<qb::ProductPoint> stream(mean_draws[gi], true);
                    const auto report = qb::sgd_quotient(stream, factor, group, sgd);
                    point.update(errors_to_json(
                        matched_errors(report.estimate, scenario.mean.true_tuple)));
                    point["wall_time_s"] = report.wall_time_s;
                }
            } else {
                const auto start = Clock::now();
                if (scenario.gaussian) {
                    qb::PivotChoice choice;
                    if (pivot_text == "boundary") {
                        choice.kind = qb::PivotKind::Index;
                        choice.index = qb::most_degenerate_sample_index(gaussian_draws[gi]);
                    } else {
                        qb::SampleFile fake;
                        fake.gaussian = true;
                        choice = pivot_choice_from(pivot_text, fake);
                    }
                    const std::size_t pivot = qb::pivot_select(gaussian_draws[gi], choice);
                    const auto result = qb::pivot_relabel(gaussian_draws[gi], pivot, group);
                    point.update(errors_to_json(
                        matched_errors(result.mean, scenario.gmm.true_components)));
                    point["pivot_index"] = pivot;
                } else {
                    const qb::EuclideanManifold factor(
                        scenario.mean.true_tuple.front().size());
                    qb::PivotChoice choice;
                    if (pivot_text == "boundary") {
                        choice.kind = qb::PivotKind::Index;
                        choice.index = qb::most_degenerate_sample_index(factor, mean_draws[gi]);
                    } else {
                        qb::SampleFile fake;
                        choice = pivot_choice_from(pivot_text, fake);
                    }
                    const std::size_t pivot = qb::pivot_select(mean_draws[gi], choice);
                    const auto result = qb::pivot_relabel(factor, mean_draws[gi], pivot, group);
                    point.update(errors_to_json(
                        matched_errors(result.mean, scenario.mean.true_tuple)));
                    point["pivot_index"] = pivot;
                }
                point["wall_time_s"] = seconds_since(start);
            }
            curve.push_back(std::move(point));
        }
        Json record = base_record("compare", cfg);
        record["method"] = method;
        record["curve"] = std::move(curve);
        records.push_back(std::move(record));
    }
    qb::write_results(cfg.get_string("out", ""), records);
    return kExitOk;
}

int cmd_mra(qb::KvConfig& cfg) {
    require_out(cfg);
    const int k = static_cast<int>(cfg.get_long("mra.k", 10));
    const int m = static_cast<int>(cfg.get_long("mra.m", 200));
    const long sweeps = cfg.get_long("mra.sweeps", 2000);
    const long burnin = cfg.get_long("mra.burnin", 100);
    const std::uint64_t seed = cfg.get_u64("seed", 7);
    if (k < 2) throw qb::ConfigError("mra: signal length must be >= 2");
    if (m < 1) throw qb::ConfigError("mra: need at least one observation");
    if (sweeps < 1 || burnin < 0 || burnin >= sweeps) {
        throw qb::ConfigError("mra: need sweeps >= 1 and 0 <= burnin < sweeps");
    }
    cfg.set("mra.k", std::to_string(k));
    cfg.set("mra.m", std::to_string(m));
    cfg.set("mra.sweeps", std::to_string(sweeps));
    cfg.set("mra.burnin", std::to_string(burnin));
    cfg.set("seed", std::to_string(seed));

    const Eigen::VectorXd signal = qb::default_mra_template(k, seed);

    // The grid is either SNR values or explicit noise levels.
    std::vector<double> sigmas;
    std::vector<double> snrs;
    if (cfg.has("mra.sigma_grid")) {
        sigmas = parse_double_list(cfg.get_string("mra.sigma_grid", ""), "mra: sigma grid");
        for (const double s : sigmas) {
            if (s <= 0) throw qb::ConfigError("mra: sigma values must be positive");
            snrs.push_back(qb::snr(signal, s));
        }
        cfg.set("mra.sigma_grid", cfg.get_string("mra.sigma_grid", ""));
    } else {
        const std::string grid_text = cfg.get_string("mra.snr_grid", "0.5,1,2,4");
        cfg.set("mra.snr_grid", grid_text);
        snrs = parse_double_list(grid_text, "mra: SNR grid");
        for (const double v : snrs) {
            if (v <= 0) throw qb::ConfigError("mra: SNR values must be positive");
            sigmas.push_back(signal.norm() / std::sqrt(static_cast<double>(k) * v));
        }
    }

    qb::SgdConfig sgd = sgd_config_from(cfg);
    if (!cfg.has("sgd.iters")) sgd.iterations = 1500;
    sgd.eval_set_size = 0;
    echo_sgd_config(cfg, sgd);

    std::vector<Json> records;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        const auto start = Clock::now();
        qb::MraScenario scenario;
        scenario.signal = signal;
        scenario.noise_std = sigmas[i];
        scenario.num_observations = m;
        scenario.seed = seed + i;
        const auto observations = qb::mra_generate(scenario);
        qb::GibbsStream chain(observations, sigmas[i], sweeps, seed + 1000 * (i + 1));
        for (long b = 0; b < burnin; ++b) chain.next();
        const Eigen::VectorXd reconstruction = qb::mra_reconstruct(chain, sgd);
        const double err =
            qb::relative_error(reconstruction, signal, qb::GroupSpec{qb::GroupKind::Cyclic, k});

        Json record = base_record("mra", cfg);
        record["metrics"] = Json{{"snr", snrs[i]},
                                 {"sigma", sigmas[i]},
                                 {"relative_error", err}};
        record["timing"] = Json{{"wall_time_s", seconds_since(start)}};
        record["reconstruction"] = vector_to_json(reconstruction);
        records.push_back(std::move(record));
    }
    qb::write_results(cfg.get_string("out", ""), records);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-invariant barycenters of posterior samples"};
    app.require_subcommand(1);

    qb::KvConfig cfg;
    std::string config_path;
    std::string seed_text, out_path, iters_text, group_text;

    const auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--seed", seed_text, "RNG seed");
        sub->add_option("--out", out_path, "output path");
        sub->add_option("--iters", iters_text, "SGD iteration count");
        sub->add_option("--group", group_text, "group action: sym, cyc or none");
    };

    std::string gen_scenario, gen_n;
    auto* gen = app.add_subcommand("gen", "generate a synthetic sample file");
    add_shared(gen);
    gen->add_option("--scenario", gen_scenario, "gmm5, ellipse or means1d");
    gen->add_option("--n", gen_n, "number of draws");

    std::string bary_in, bary_truth;
    auto* bary = app.add_subcommand("barycenter", "quotient-space SGD barycenter of a sample file");
    add_shared(bary);
    bary->add_option("--in", bary_in, "input sample CSV");
    bary->add_option("--truth", bary_truth, "scenario providing ground truth for error metrics");

    std::string pivot_in, pivot_choice;
    auto* pivot = app.add_subcommand("pivot", "pivotal reordering baseline on a sample file");
    add_shared(pivot);
    pivot->add_option("--in", pivot_in, "input sample CSV");
    pivot->add_option("--pivot", pivot_choice, "map, boundary or a sample index");

    std::string cmp_scenario, cmp_methods, cmp_grid, cmp_pivot;
    auto* cmp = app.add_subcommand("compare", "run methods on identical draws over a sample grid");
    add_shared(cmp);
    cmp->add_option("--scenario", cmp_scenario, "gmm5, ellipse or means1d");
    cmp->add_option("--methods", cmp_methods, "comma list of sgd,pivot");
    cmp->add_option("--grid", cmp_grid, "comma list of sample counts");
    cmp->add_option("--pivot", cmp_pivot, "map, boundary or a sample index");

    std::string mra_k, mra_m, mra_snr, mra_sigma, mra_sweeps, mra_burnin;
    auto* mra = app.add_subcommand("mra", "multi-reference alignment pipeline over an SNR grid");
    add_shared(mra);
    mra->add_option("--k", mra_k, "signal length");
    mra->add_option("--m", mra_m, "observations per grid point");
    mra->add_option("--snr-grid", mra_snr, "comma list of SNR values");
    mra->add_option("--sigma-grid", mra_sigma, "comma list of noise levels (overrides SNR grid)");
    mra->add_option("--sweeps", mra_sweeps, "Gibbs sweeps");
    mra->add_option("--burnin", mra_burnin, "sweeps discarded before reconstruction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (!config_path.empty()) cfg = qb::KvConfig::load(config_path);
        const auto override_if = [&](const std::string& key, const std::string& value) {
            if (!value.empty()) cfg.set(key, value);
        };
        override_if("seed", seed_text);
        override_if("out", out_path);
        override_if("sgd.iters", iters_text);
        override_if("group", group_text);
        override_if("gen.scenario", gen_scenario);
        override_if("gen.n", gen_n);
        override_if("barycenter.in", bary_in);
        override_if("barycenter.truth", bary_truth);
        override_if("pivot.in", pivot_in);
        override_if("pivot.choice", pivot_choice);
        override_if("compare.scenario", cmp_scenario);
        override_if("compare.methods", cmp_methods);
        override_if("compare.grid", cmp_grid);
        override_if("compare.pivot", cmp_pivot);
        override_if("mra.k", mra_k);
        override_if("mra.m", mra_m);
        override_if("mra.snr_grid", mra_snr);
        override_if("mra.sigma_grid", mra_sigma);
        override_if("mra.sweeps", mra_sweeps);
        override_if("mra.burnin", mra_burnin);

        if (gen->parsed()) return cmd_gen(cfg);
        if (bary->parsed()) return cmd_barycenter(cfg);
        if (pivot->parsed()) return cmd_pivot(cfg);
        if (cmp->parsed()) return cmd_compare(cfg);
        if (mra->parsed()) return cmd_mra(cfg);
        throw qb::ConfigError("no command given");
    } catch (const qb::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const qb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qb::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
