#pragma once

#include "gnfr/io.hpp"
#include "gnfr/simulate.hpp"
#include "gnfr/transport.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace gnfr::cli {

namespace detail {

struct Options {
    std::uint64_t seed = 1;
    int grid_size = kDefaultGridSize;
    std::optional<double> epsilon;
    std::string kernel = "gaussian";
    std::string out;

    std::string predictors_path;
    std::string responses_path;
    std::string queries_path;
    std::string spec_path;
    std::string predictor_kind = "binned";
    int abscissae = 200;
    bool loo_gcv = false;
};

struct LoadedData {
    std::vector<std::string> ids;
    std::vector<MetricObject> predictors;
    std::vector<std::string> response_ids;
    std::vector<MetricObject> responses;
    ProbGrid grid;
};

inline LoadedData load_training(const Options& opt) {
    ProbGrid grid = ProbGrid::equispaced(opt.grid_size);
    LoadedData data{{}, {}, {}, {}, grid};
    if (opt.predictor_kind == "binned") {
        auto [ids, objs] = ingest_binned(opt.predictors_path, grid);
        data.ids = std::move(ids);
        data.predictors = std::move(objs);
    } else if (opt.predictor_kind == "euclidean") {
        auto [ids, objs] = ingest_euclidean(opt.predictors_path);
        data.ids = std::move(ids);
        data.predictors = std::move(objs);
    } else {
        throw ParseError("predictor kind must be binned or euclidean: " + opt.predictor_kind, 0);
    }
    auto [rids, robjs] = ingest_binned(opt.responses_path, grid);
    data.response_ids = std::move(rids);
    data.responses = std::move(robjs);
    if (data.predictors.size() != data.responses.size())
        throw ParseError("predictor and response files have different row counts", 0);
    return data;
}

inline KernelSpec resolve_kernel(const Options& opt, const std::vector<MetricObject>& predictors) {
    if (opt.kernel == "gaussian") return KernelSpec::gaussian_rbf(bandwidth_heuristic(predictors));
    if (opt.kernel == "laplacian") return KernelSpec::laplacian(bandwidth_heuristic(predictors));
    if (opt.kernel == "linear") return KernelSpec::linear(1.0);
    throw ParseError("kernel must be gaussian, laplacian or linear: " + opt.kernel, 0);
}

class OutputStream {
  public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ParseError("cannot open output file: " + path, 0);
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

inline nlohmann::json kernel_json(const KernelSpec& spec) {
    nlohmann::json j;
    switch (spec.kind) {
        case KernelSpec::Kind::gaussian_rbf: j["kind"] = "gaussian"; j["gamma"] = spec.gamma; break;
        case KernelSpec::Kind::laplacian: j["kind"] = "laplacian"; j["gamma"] = spec.gamma; break;
        case KernelSpec::Kind::linear: j["kind"] = "linear"; j["offset"] = spec.offset_c; break;
    }
    return j;
}

inline nlohmann::json gcv_table_json(const GcvResult& tuned) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& entry : tuned.table) {
        nlohmann::json row;
        row["epsilon"] = entry.epsilon;
        row["gcv"] = entry.finite ? nlohmann::json(entry.gcv) : nlohmann::json("inf");
        row["trace_term"] = entry.trace_term;
        row["denominator"] = entry.denominator;
        rows.push_back(row);
    }
    return rows;
}

struct TunedFit {
    FittedModel model;
    std::optional<GcvResult> tuned;
};

inline TunedFit fit_with_options(const Options& opt, const LoadedData& data,
                                 const KernelSpec& kernel) {
    if (opt.epsilon) return {fit(data.predictors, data.responses, kernel, *opt.epsilon), {}};
    GcvResult tuned = gcv_tune(data.predictors, data.responses, kernel);
    return {fit(data.predictors, data.responses, kernel, tuned.best_epsilon), tuned};
}

inline int cmd_fit(const Options& opt) {
    LoadedData data = load_training(opt);
    KernelSpec kernel = resolve_kernel(opt, data.predictors);
    TunedFit fitted = fit_with_options(opt, data, kernel);

    std::vector<MetricObject> at_train = predict_at_training(fitted.model);
    double mean_err = 0.0;
    for (size_t i = 0; i < at_train.size(); ++i)
        mean_err += distance(data.responses[i], at_train[i]) / double(at_train.size());

    nlohmann::json summary;
    summary["n"] = data.predictors.size();
    summary["grid_size"] = opt.grid_size;
    summary["predictor_kind"] = opt.predictor_kind;
    summary["kernel"] = kernel_json(kernel);
    summary["epsilon"] = fitted.model.epsilon();
    if (fitted.tuned) summary["gcv_table"] = gcv_table_json(*fitted.tuned);
    summary["mean_training_distance"] = mean_err;

    OutputStream out(opt.out);
    out.get() << summary.dump(2) << "\n";
    return 0;
}

inline int cmd_predict(const Options& opt) {
    LoadedData data = load_training(opt);
    KernelSpec kernel = resolve_kernel(opt, data.predictors);
    TunedFit fitted = fit_with_options(opt, data, kernel);

    std::vector<std::string> query_ids;
    std::vector<MetricObject> queries;
    if (opt.predictor_kind == "binned") {
        auto [ids, objs] = ingest_binned(opt.queries_path, data.grid);
        query_ids = std::move(ids);
        queries = std::move(objs);
    } else {
        auto [ids, objs] = ingest_euclidean(opt.queries_path);
        query_ids = std::move(ids);
        queries = std::move(objs);
    }

    std::vector<MetricObject> predictions;
    predictions.reserve(queries.size());
    for (const auto& q : queries) predictions.push_back(predict(fitted.model, q));

    OutputStream out(opt.out);
    write_quantile_csv(out.get(), query_ids, predictions);
    return 0;
}

inline int cmd_tune(const Options& opt) {
    LoadedData data = load_training(opt);
    KernelSpec kernel = resolve_kernel(opt, data.predictors);
    GcvResult tuned = gcv_tune(data.predictors, data.responses, kernel);
    OutputStream out(opt.out);
    out.get() << "epsilon,gcv,trace_term,denominator\n";
    for (const auto& entry : tuned.table)
        out.get() << format_double(entry.epsilon) << ","
                  << (entry.finite ? format_double(entry.gcv) : "inf") << ","
                  << format_double(entry.trace_term) << "," << format_double(entry.denominator)
                  << "\n";
    return 0;
}

inline int cmd_simulate(const Options& opt, bool seed_given, bool grid_given) {
    std::ifstream in(opt.spec_path);
    if (!in) throw ParseError("cannot open spec file: " + opt.spec_path, 0);
    ScenarioSpec spec = parse_scenario_config(in);
    if (seed_given) spec.seed = opt.seed;
    if (grid_given) spec.grid_size = opt.grid_size;
    MpeReport report = run_scenario(spec);
    OutputStream out(opt.out);
    write_mpe_csv(out.get(), report);
    return 0;
}

inline int cmd_residuals(const Options& opt) {
    LoadedData data = load_training(opt);
    if (opt.predictor_kind != "binned" && data.responses.empty())
        throw ParseError("residuals needs quantile responses", 0);
    KernelSpec kernel = resolve_kernel(opt, data.predictors);

    std::optional<double> eps = opt.epsilon;
    if (!eps && !opt.loo_gcv)
        eps = gcv_tune(data.predictors, data.responses, kernel).best_epsilon;
    LooResult loo = loo_predict(data.predictors, data.responses, kernel, eps);

    Vec abscissae = transport_abscissae(data.responses, opt.abscissae);
    std::vector<TransportMap> maps;
    maps.reserve(data.responses.size());
    for (size_t i = 0; i < data.responses.size(); ++i)
        maps.push_back(residual_map(std::get<QuantileObject>(data.responses[i]),
                                    std::get<QuantileObject>(loo.predictions[i]), abscissae));
    TransportMap mean_map = mean_transport_map(maps);

    OutputStream out(opt.out);
    out.get() << "subject,a,value\n";
    for (size_t i = 0; i < maps.size(); ++i)
        for (Eigen::Index j = 0; j < abscissae.size(); ++j)
            out.get() << data.response_ids[i] << "," << format_double(abscissae[j]) << ","
                      << format_double(maps[i].values[j]) << "\n";
    for (Eigen::Index j = 0; j < abscissae.size(); ++j)
        out.get() << "mean," << format_double(abscissae[j]) << ","
                  << format_double(mean_map.values[j]) << "\n";
    for (Eigen::Index j = 0; j < abscissae.size(); ++j)
        out.get() << "identity," << format_double(abscissae[j]) << ","
                  << format_double(abscissae[j]) << "\n";
    return 0;
}

}  // namespace detail

/// Command-line entry point; returns the process exit status.
inline int run(int argc, const char* const* argv) {
    detail::Options opt;
    CLI::App app{"Nonlinear global Frechet regression for metric-space data"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--seed", opt.seed, "Random seed");
    app.add_option("--grid-size", opt.grid_size, "Quantile grid size M")->check(CLI::Range(2, 100000));
    app.add_option("--epsilon", opt.epsilon, "Fixed regularization constant (default: GCV)");
    app.add_option("--kernel", opt.kernel, "Kernel: gaussian | laplacian | linear");
    app.add_option("--out", opt.out, "Output file (default: stdout)");

    auto add_training_io = [&](CLI::App* sub) {
        sub->add_option("--predictors", opt.predictors_path, "Predictor CSV")->required();
        sub->add_option("--responses", opt.responses_path, "Response binned CSV")->required();
        sub->add_option("--predictor-kind", opt.predictor_kind, "binned | euclidean");
    };

    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a model and emit a JSON summary");
    add_training_io(fit_cmd);

    CLI::App* predict_cmd =
        app.add_subcommand("predict", "Fit, then predict responses for query predictors");
    add_training_io(predict_cmd);
    predict_cmd->add_option("--queries", opt.queries_path, "Query predictor CSV")->required();

    CLI::App* tune_cmd = app.add_subcommand("tune", "Emit the GCV table over the epsilon grid");
    add_training_io(tune_cmd);

    CLI::App* sim_cmd = app.add_subcommand("simulate", "Run a scenario config, emit MPE CSV");
    sim_cmd->add_option("--spec", opt.spec_path, "Scenario config file")->required();

    CLI::App* resid_cmd = app.add_subcommand(
        "residuals", "Leave-one-out predictions and transport maps, plot-ready CSV");
    add_training_io(resid_cmd);
    resid_cmd->add_option("--abscissae", opt.abscissae, "Evaluation points for transport maps")
        ->check(CLI::Range(2, 100000));
    resid_cmd->add_flag("--loo-gcv", opt.loo_gcv, "Re-tune GCV in every fold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(fit_cmd)) return detail::cmd_fit(opt);
        if (app.got_subcommand(predict_cmd)) return detail::cmd_predict(opt);
        if (app.got_subcommand(tune_cmd)) return detail::cmd_tune(opt);
        if (app.got_subcommand(sim_cmd))
            return detail::cmd_simulate(opt, app.count("--seed") > 0, app.count("--grid-size") > 0);
        if (app.got_subcommand(resid_cmd)) return detail::cmd_residuals(opt);
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace gnfr::cli
