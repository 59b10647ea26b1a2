#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "spdsliced/adaptation.hpp"
#include "spdsliced/experiments.hpp"
#include "spdsliced/io.hpp"
#include "spdsliced/parallel.hpp"

using namespace spdsliced;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::InstanceTooLarge:
        case ErrorCode::BasisMismatch:
            return kExitUsage;
        case ErrorCode::NotConverged:
        case ErrorCode::IllConditioned:
        case ErrorCode::Overflow:
        case ErrorCode::DegenerateDirection:
        case ErrorCode::DegenerateSample:
        case ErrorCode::SingularFeatures:
            return kExitNumerical;
        default:
            return kExitData;
    }
}

struct OutputOptions {
    std::string output;
    std::string format = "json";
};

struct GlobalOptions {
    unsigned threads = 0;
    bool omit_timing = false;
};

void add_output(CLI::App *cmd, OutputOptions &out) {
    cmd->add_option("--output,-o", out.output, "Write the report here instead of stdout");
    cmd->add_option("--format", out.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

void emit(ExperimentReport report, const OutputOptions &out, const GlobalOptions &global) {
    if (global.omit_timing) report.timing = Json::object();
    const std::string text = out.format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n";
    if (out.output.empty()) {
        std::cout << text;
    } else {
        write_file_atomic(out.output, text);
    }
}

RngState seed_state(std::uint64_t seed) { return RngState{seed, 0}; }

std::vector<Estimator> parse_metrics(const std::vector<std::string> &names) {
    std::vector<Estimator> out;
    for (const auto &n : names) out.push_back(estimator_from_string(n));
    return out;
}

Matrix read_scale(const std::string &spec, Index d) {
    if (spec == "identity") return Matrix::Identity(d, d);
    const auto file = read_spd_dataset(spec);
    require(file.measure.dim() == d, ErrorCode::DimensionMismatch, "scale file dimension differs from --d");
    return file.measure[0].matrix();
}

std::vector<RegressionItem> read_manifest(const std::string &path) {
    Json doc;
    try {
        doc = Json::parse(read_file(path));
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::InvalidData, "manifest '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("items") || !doc["items"].is_array() || doc["items"].empty()) {
        throw Error(ErrorCode::InvalidData, "manifest needs a nonempty 'items' array");
    }
    const fs::path base = fs::path(path).parent_path();
    std::vector<RegressionItem> items;
    for (const auto &entry : doc["items"]) {
        if (!entry.contains("target") || !entry["target"].is_number()) {
            throw Error(ErrorCode::InvalidData, "manifest item needs a numeric 'target'");
        }
        std::vector<std::string> files;
        if (entry.contains("bands") && entry["bands"].is_array()) {
            for (const auto &b : entry["bands"]) files.push_back(b.get<std::string>());
        } else if (entry.contains("path") && entry["path"].is_string()) {
            files.push_back(entry["path"].get<std::string>());
        } else {
            throw Error(ErrorCode::InvalidData, "manifest item needs 'bands' or 'path'");
        }
        RegressionItem item;
        item.target = entry["target"].get<double>();
        for (const auto &f : files) {
            const fs::path p = fs::path(f).is_absolute() ? fs::path(f) : base / f;
            item.bands.push_back(read_spd_dataset(p).measure);
        }
        items.push_back(std::move(item));
    }
    return items;
}

std::string predictions_csv(const std::vector<RegressionItem> &items, const Vector &pred) {
    std::string out = "index,target,prediction\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += std::to_string(i) + "," + Json(items[i].target).dump() + "," + Json(pred(Index(i))).dump() + "\n";
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Sliced Wasserstein discrepancies on SPD matrices"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions global;
    app.add_option("--threads", global.threads, "Worker threads (default: SPDSLICED_THREADS or all cores)");
    app.add_flag("--omit-timing", global.omit_timing, "Leave wall times out of the report");

    // distance
    auto *distance = app.add_subcommand("distance", "Discrepancy between two dataset files");
    std::string x_path, y_path, metric = "spdsw", sampler = "eig";
    Index projections = 500;
    double order = 2, epsilon = 1;
    std::uint64_t seed = 0;
    Index exact_cap = kExactSizeCap;
    OutputOptions distance_out;
    distance->add_option("x", x_path, "First dataset file")->required();
    distance->add_option("y", y_path, "Second dataset file")->required();
    distance->add_option("--metric", metric)->check(CLI::IsMember({"spdsw", "logsw", "hspdsw", "lew", "les", "aiw"}));
    distance->add_option("--projections,-L", projections)->check(CLI::PositiveNumber);
    distance->add_option("--order,-p", order)->check(CLI::Range(1.0, 1e6));
    distance->add_option("--seed", seed);
    distance->add_option("--sampler", sampler)->check(CLI::IsMember({"eig", "fast"}));
    distance->add_option("--epsilon", epsilon, "Entropic regularization for les")->check(CLI::PositiveNumber);
    distance->add_option("--exact-cap", exact_cap, "Largest exact transport instance")->check(CLI::PositiveNumber);
    add_output(distance, distance_out);

    // benchmark-runtime
    auto *runtime = app.add_subcommand("benchmark-runtime", "Wall time against the number of points");
    RuntimeConfig runtime_cfg;
    runtime_cfg.n_grid = {1000, 3162, 10000, 31623, 100000};
    std::vector<std::string> runtime_metrics{"spdsw", "logsw", "lew"};
    std::size_t memory_cap_mb = 256;
    std::uint64_t runtime_seed = 0;
    OutputOptions runtime_out;
    runtime->add_option("--n-grid", runtime_cfg.n_grid)->delimiter(',');
    runtime->add_option("--d", runtime_cfg.d)->check(CLI::PositiveNumber);
    runtime->add_option("--projections,-L", runtime_cfg.num_projections)->check(CLI::PositiveNumber);
    runtime->add_option("--metrics", runtime_metrics)->delimiter(',');
    runtime->add_option("--repeats", runtime_cfg.repeats)->check(CLI::PositiveNumber);
    runtime->add_option("--memory-cap-mb", memory_cap_mb, "Skip transport runs whose cost matrix exceeds this");
    runtime->add_option("--seed", runtime_seed);
    add_output(runtime, runtime_out);

    // sample-complexity
    auto *sample = app.add_subcommand("sample-complexity", "Estimator decay with the number of samples");
    SampleComplexityConfig sample_cfg;
    std::vector<std::string> sample_metrics{"spdsw", "lew"};
    std::uint64_t sample_seed = 0;
    OutputOptions sample_out;
    sample->add_option("--dims", sample_cfg.dims)->delimiter(',');
    sample->add_option("--n-grid", sample_cfg.n_grid)->delimiter(',');
    sample->add_option("--repeats", sample_cfg.repeats)->check(CLI::Range(Index(2), Index(1) << 30));
    sample->add_option("--metric,--metrics", sample_metrics)->delimiter(',');
    sample->add_option("--projections,-L", sample_cfg.num_projections)->check(CLI::PositiveNumber);
    sample->add_option("--seed", sample_seed);
    add_output(sample, sample_out);

    // projection-complexity
    auto *projection = app.add_subcommand("projection-complexity", "Monte Carlo error against the number of slices");
    ProjectionComplexityConfig projection_cfg;
    std::uint64_t projection_seed = 0;
    std::string projection_sampler = "eig";
    OutputOptions projection_out;
    projection->add_option("--L-grid", projection_cfg.projection_grid)->delimiter(',');
    projection->add_option("--L-star", projection_cfg.reference_projections)->check(CLI::PositiveNumber);
    projection->add_option("--repeats", projection_cfg.repeats)->check(CLI::PositiveNumber);
    projection->add_option("--dims", projection_cfg.dims)->delimiter(',');
    projection->add_option("--n", projection_cfg.n)->check(CLI::PositiveNumber);
    projection->add_option("--sampler", projection_sampler)->check(CLI::IsMember({"eig", "fast"}));
    projection->add_option("--seed", projection_seed);
    add_output(projection, projection_out);

    // adapt
    auto *adapt = app.add_subcommand("adapt", "Align a labeled source dataset onto a target dataset");
    std::string source_path, target_path, adapted_path, mode = "particles", loss = "spdsw";
    AdaptationConfig adapt_cfg;
    std::uint64_t adapt_seed = 0;
    double adapt_epsilon = 10, l2_penalty = 1e-2;
    bool no_safeguard = false, evaluate = false;
    OutputOptions adapt_out;
    adapt->add_option("--source", source_path)->required();
    adapt->add_option("--target", target_path)->required();
    adapt->add_option("--mode", mode)->check(CLI::IsMember({"particles", "transform"}));
    adapt->add_option("--loss", loss)->check(CLI::IsMember({"spdsw", "logsw", "lew", "les"}));
    adapt->add_option("--epochs", adapt_cfg.epochs)->check(CLI::NonNegativeNumber);
    adapt->add_option("--lr", adapt_cfg.learning_rate)->check(CLI::PositiveNumber);
    adapt->add_option("--projections,-L", adapt_cfg.num_projections)->check(CLI::PositiveNumber);
    adapt->add_option("--seed", adapt_seed);
    adapt->add_option("--epsilon", adapt_epsilon, "Entropic regularization for les")->check(CLI::PositiveNumber);
    adapt->add_option("--l2", l2_penalty, "Classifier penalty")->check(CLI::PositiveNumber);
    adapt->add_flag("--no-safeguard", no_safeguard, "Keep the step size fixed even when the loss increases");
    adapt->add_flag("--evaluate", evaluate, "Require target labels and report accuracies");
    adapt->add_option("--adapted-output", adapted_path, "Write the adapted source dataset here");
    add_output(adapt, adapt_out);

    // kernel-ridge
    auto *ridge = app.add_subcommand("kernel-ridge", "Distribution regression with a sliced Gaussian kernel");
    std::string train_manifest, test_manifest, sigma_spec = "median", predictions_path;
    KernelRidgeConfig ridge_cfg;
    std::uint64_t ridge_seed = 0;
    OutputOptions ridge_out;
    ridge->add_option("--train", train_manifest)->required();
    ridge->add_option("--test", test_manifest, "Evaluate on these items instead of cross-validating");
    ridge->add_option("--projections,-L", ridge_cfg.num_projections)->check(CLI::PositiveNumber);
    ridge->add_option("--quantiles,-M", ridge_cfg.quantiles)->check(CLI::PositiveNumber);
    ridge->add_option("--sigma", sigma_spec, "'median' or a positive bandwidth");
    ridge->add_option("--alpha", ridge_cfg.alpha)->check(CLI::PositiveNumber);
    ridge->add_option("--folds", ridge_cfg.folds)->check(CLI::Range(Index(2), Index(1) << 30));
    ridge->add_option("--seed", ridge_seed);
    ridge->add_option("--predictions", predictions_path, "Write per-item predictions as CSV");
    add_output(ridge, ridge_out);

    // gen-wishart
    auto *gen = app.add_subcommand("gen-wishart", "Generate Wishart dataset files");
    Index gen_d = 3, gen_n = 100, gen_dof = 0;
    int gen_classes = 0;
    std::string gen_scale = "identity", gen_output, gen_shift_output;
    double shift_angle = 0, shift_translation = 0;
    bool gen_shift = false;
    std::uint64_t gen_seed = 0;
    gen->add_option("--d", gen_d)->check(CLI::PositiveNumber);
    gen->add_option("--n", gen_n, "Points (per class when --classes is set)")->check(CLI::PositiveNumber);
    gen->add_option("--dof", gen_dof, "Degrees of freedom (default d)");
    gen->add_option("--scale", gen_scale, "'identity' or a dataset file whose first matrix is the scale");
    gen->add_option("--classes", gen_classes, "Class k uses scale (1 + k) times --scale")->check(CLI::PositiveNumber);
    gen->add_flag("--shift", gen_shift, "Also write a shifted copy");
    gen->add_option("--shift-angle", shift_angle, "Rotation angle of the shifted copy");
    gen->add_option("--shift-log-translation", shift_translation, "Log-scale translation s (adds s*I to every log)");
    gen->add_option("--shift-output", gen_shift_output, "Path of the shifted copy");
    gen->add_option("--seed", gen_seed);
    gen->add_option("--output,-o", gen_output)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (global.threads == 0) {
            if (const char *env = std::getenv("SPDSLICED_THREADS")) global.threads = unsigned(std::stoul(env));
        }
        set_thread_count(global.threads);

        if (*distance) {
            const auto sampler_kind = sampler_kind_from_string(sampler);
            if (metric == "hspdsw" && sampler_kind != SamplerKind::eig_uniform) {
                throw Error(ErrorCode::InvalidArgument, "--sampler fast cannot be combined with --metric hspdsw");
            }
            const auto x = read_spd_dataset(x_path);
            const auto y = read_spd_dataset(y_path);
            DistanceOptions opts;
            opts.metric = estimator_from_string(metric);
            opts.num_projections = projections;
            opts.p = order;
            opts.seed = seed_state(seed);
            opts.sampler = sampler_kind;
            opts.epsilon = epsilon;
            opts.exact_size_cap = exact_cap;
            const auto r = compute_distance(x.measure, y.measure, opts);
            ExperimentReport report;
            report.experiment = "distance";
            report.config = {{"x", x_path},     {"y", y_path},       {"metric", metric},
                             {"projections", projections}, {"order", order}, {"seed", rng_json(opts.seed)},
                             {"sampler", sampler}, {"epsilon", epsilon}, {"exact_cap", exact_cap},
                             {"sizes", Json::array({x.measure.size(), y.measure.size()})},
                             {"dim", x.measure.dim()}};
            report.rows.push_back(discrepancy_row(r));
            report.timing["wall_time_seconds"] = r.wall_time_seconds;
            emit(report, distance_out, global);
        } else if (*runtime) {
            runtime_cfg.metrics = parse_metrics(runtime_metrics);
            runtime_cfg.cost_memory_cap_bytes = memory_cap_mb << 20;
            runtime_cfg.seed = seed_state(runtime_seed);
            emit(run_runtime_benchmark(runtime_cfg), runtime_out, global);
        } else if (*sample) {
            sample_cfg.metrics = parse_metrics(sample_metrics);
            sample_cfg.seed = seed_state(sample_seed);
            auto report = run_sample_complexity(sample_cfg);
            Index largest = 0;
            for (Index d : sample_cfg.dims) largest = std::max(largest, d);
            report.config["default_dimension_cap"] = 20;
            report.config["dimension_cap_raised"] = largest > 20;
            emit(report, sample_out, global);
        } else if (*projection) {
            projection_cfg.seed = seed_state(projection_seed);
            projection_cfg.sampler = sampler_kind_from_string(projection_sampler);
            emit(run_projection_complexity(projection_cfg), projection_out, global);
        } else if (*adapt) {
            const auto source = read_spd_dataset(source_path);
            const auto target = read_spd_dataset(target_path);
            if (!source.labels) throw Error(ErrorCode::MissingLabels, "source dataset needs labels");
            if (evaluate && !target.labels) throw Error(ErrorCode::MissingLabels, "evaluation needs target labels");
            adapt_cfg.mode = adaptation_mode_from_string(mode);
            adapt_cfg.loss.kind = loss_kind_from_string(loss);
            adapt_cfg.loss.sinkhorn.epsilon = adapt_epsilon;
            adapt_cfg.seed = seed_state(adapt_seed);
            adapt_cfg.safeguard = !no_safeguard;
            const auto labeled_source = source.labeled();

            ExperimentReport report;
            report.experiment = "adapt";
            report.config = adaptation_config_json(adapt_cfg);
            report.config["source"] = source_path;
            report.config["target"] = target_path;
            report.config["l2_penalty"] = l2_penalty;

            std::optional<AdaptationTrace> trace;
            if (target.labels) {
                auto outcome = evaluate_adaptation(labeled_source, target.labeled(), adapt_cfg, l2_penalty);
                report.rows.push_back({{"kind", "accuracy_before"}, {"value", outcome.accuracy_before}});
                report.rows.push_back({{"kind", "accuracy_after"}, {"value", outcome.accuracy_after}});
                trace = std::move(outcome.trace);
            } else {
                trace = run_adaptation(labeled_source, target.measure, adapt_cfg);
            }
            for (std::size_t e = 0; e < trace->losses.size(); ++e) {
                report.rows.push_back({{"kind", "loss"}, {"epoch", Index(e)}, {"value", trace->losses[e]}});
            }
            report.rows.push_back({{"kind", "final_learning_rate"}, {"value", trace->final_learning_rate}});
            report.rows.push_back({{"kind", "rejected_steps"}, {"value", trace->rejected_steps}});
            report.timing["wall_time_seconds"] = trace->wall_time_seconds;
            if (!adapted_path.empty()) {
                write_spd_dataset(adapted_path, trace->adapted_source.measure, trace->adapted_source.labels);
            }
            emit(report, adapt_out, global);
        } else if (*ridge) {
            if (sigma_spec != "median") {
                std::size_t used = 0;
                double sigma = 0;
                try {
                    sigma = std::stod(sigma_spec, &used);
                } catch (const std::exception &) {
                    used = 0;
                }
                if (used != sigma_spec.size() || !(sigma > 0)) {
                    throw Error(ErrorCode::InvalidArgument, "--sigma must be 'median' or a positive number");
                }
                ridge_cfg.sigma = sigma;
            }
            ridge_cfg.seed = seed_state(ridge_seed);
            const auto train = read_manifest(train_manifest);
            RegressionResult result;
            std::vector<RegressionItem> scored;
            if (test_manifest.empty()) {
                result = run_kernel_ridge_cv(train, ridge_cfg);
                scored = train;
            } else {
                scored = read_manifest(test_manifest);
                result = run_kernel_ridge_split(train, scored, ridge_cfg);
            }
            result.report.config["train"] = train_manifest;
            if (!test_manifest.empty()) result.report.config["test"] = test_manifest;
            if (!predictions_path.empty()) write_file_atomic(predictions_path, predictions_csv(scored, result.predictions));
            emit(result.report, ridge_out, global);
        } else if (*gen) {
            const Index dof = gen_dof == 0 ? gen_d : gen_dof;
            if (dof < gen_d) throw Error(ErrorCode::InvalidArgument, "--dof must be at least --d");
            const Matrix scale = read_scale(gen_scale, gen_d);
            const auto rng = seed_state(gen_seed);
            std::optional<std::vector<int>> labels;
            EmpiricalSpdMeasure measure = [&] {
                if (gen_classes > 0) {
                    auto ds = wishart_classes(rng.derive(0), gen_d, gen_n, dof, scale, gen_classes);
                    labels = ds.labels;
                    return ds.measure;
                }
                return wishart_measure(rng.derive(0), gen_n, gen_d, dof, scale);
            }();
            write_spd_dataset(gen_output, measure, labels);
            const bool want_shift = gen_shift || shift_angle != 0 || shift_translation != 0 || !gen_shift_output.empty();
            if (want_shift) {
                const std::string path = gen_shift_output.empty() ? gen_output + ".shifted.json" : gen_shift_output;
                const auto shifted = apply_domain_shift(measure, rng.derive(1), DomainShift{shift_angle, shift_translation});
                write_spd_dataset(path, shifted, labels);
            }
        }
    } catch (const Error &e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}
