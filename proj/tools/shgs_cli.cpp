// Command-line front end: run sweeps, re-render plots, summarize timing,
// and print reduced-range recommendations.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "shgs/shgs.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

struct RunFlags {
    std::string config_path;
    std::string dataset;
    std::string target;
    std::string target_column;
    std::string positive_label;
    std::string output_dir;
    int iterations = -1;
    long long seed = -1;
    double test_fraction = -1.0;
    int folds = -1;
    int threads = -1;
    std::vector<std::string> overrides;
    bool no_plots = false;
};

shgs::RunConfig build_config(const RunFlags& flags) {
    shgs::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = shgs::parse_config(flags.config_path);
    if (!flags.dataset.empty()) cfg.dataset = flags.dataset;
    if (!flags.target.empty()) {
        cfg.target = shgs::parse_target(flags.target);
        cfg.target_set = true;
    }
    if (!flags.target_column.empty()) cfg.target_column = flags.target_column;
    if (!flags.positive_label.empty()) cfg.positive_label = flags.positive_label;
    if (!flags.output_dir.empty()) cfg.output_dir = flags.output_dir;
    if (flags.iterations >= 0) cfg.iterations = flags.iterations;
    if (flags.seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.test_fraction >= 0.0) cfg.test_fraction = flags.test_fraction;
    if (flags.folds >= 0) cfg.folds = flags.folds;
    if (flags.threads >= 0) cfg.threads = flags.threads;
    for (const auto& entry : flags.overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw shgs::usage_error("--set expects key=value, got '" + entry + "'");
        shgs::apply_override_entry(cfg.overrides, entry.substr(0, eq), entry.substr(eq + 1));
    }
    cfg.validate();
    shgs::validate_override_bounds(cfg.overrides);
    return cfg;
}

int cmd_run(const RunFlags& flags) {
    const auto cfg = build_config(flags);
    std::filesystem::create_directories(cfg.output_dir);

    std::size_t done = 0;
    shgs::SweepOptions options;
    options.on_trial = [&](const shgs::TrialRecord&) {
        if (++done % 100 == 0) std::cerr << "  " << done << " trials done\n";
    };

    std::cerr << "running " << shgs::to_string(cfg.target) << " sweep on "
              << cfg.dataset.string() << " (" << cfg.iterations << " iterations)\n";
    const shgs::RunOutputs run = shgs::execute_run(cfg, options);

    const auto csv_path = cfg.output_dir / "results.csv";
    shgs::write_results_csv(run.report, csv_path);
    std::vector<std::filesystem::path> plots;
    if (!flags.no_plots)
        plots = shgs::render_scatter(run.report, shgs::PlotField::test_auc, cfg.output_dir);

    const auto& rep = run.report;
    std::cout << "dataset:        " << rep.dataset_name << " (" << run.data.n_rows() << " rows, "
              << run.data.n_features() << " features, " << run.data.n_positive()
              << " positive)\n";
    std::cout << "split:          " << run.plan.n_train() << " train / "
              << run.plan.test_indices.size() << " test, " << run.plan.fold_count << " folds\n";
    std::cout << "sweep:          " << shgs::to_string(rep.target) << ", " << rep.values.size()
              << " values x " << rep.iterations << " iterations = " << rep.records.size()
              << " trials\n";
    std::cout << "best test_auc:  " << shgs::fmt_g6(rep.best_test_auc()) << "\n";
    std::cout << "total runtime:  " << shgs::fmt_g6(rep.total_runtime_seconds) << " s\n";
    std::cout << "results:        " << csv_path.string() << "\n";
    if (!plots.empty())
        std::cout << "plots:          " << plots.front().parent_path().string() << " ("
                  << plots.size() << " SVG files)\n";
    return 0;
}

int cmd_recommend(const std::string& target_name, int n_train, const std::string& results_path) {
    const auto target = shgs::parse_target(target_name);
    if (target == shgs::TargetHyperparameter::batch_size && n_train <= 0)
        throw shgs::usage_error("recommend: --n-train is required for a batch_size target");

    shgs::SweepReport report;
    const shgs::SweepReport* report_ptr = nullptr;
    if (!results_path.empty()) {
        report = shgs::read_results_csv(results_path);
        report_ptr = &report;
    }
    const auto rec = shgs::recommend_range(target, n_train, report_ptr);
    std::cout << "target:          " << target_name << "\n";
    std::cout << "rule range:      [" << shgs::fmt_g6(rec.lo) << ", " << shgs::fmt_g6(rec.hi)
              << "]\n";
    if (rec.empirical)
        std::cout << "empirical range: [" << shgs::fmt_g6(rec.empirical->first) << ", "
                  << shgs::fmt_g6(rec.empirical->second) << "]\n";
    return 0;
}

int cmd_plot(const std::string& results_path, const std::string& y_field,
             const std::string& output_dir) {
    const auto report = shgs::read_results_csv(results_path);
    shgs::PlotField field;
    if (y_field == "test_auc") field = shgs::PlotField::test_auc;
    else if (y_field == "runtime") field = shgs::PlotField::runtime;
    else throw shgs::usage_error("plot: --y must be test_auc or runtime");
    const auto written = shgs::render_scatter(report, field, output_dir);
    for (const auto& p : written) std::cout << p.string() << "\n";
    return 0;
}

int cmd_timing(const std::vector<std::string>& results_paths, const std::string& out_path) {
    std::vector<shgs::SweepReport> reports;
    reports.reserve(results_paths.size());
    for (const auto& p : results_paths) reports.push_back(shgs::read_results_csv(p));
    const auto summary = shgs::timing_summary(reports);
    shgs::write_timing_csv(summary, out_path);
    for (const auto& row : summary.per_dataset)
        std::cout << row.dataset << ": " << row.settings << " settings, "
                  << shgs::fmt_g6(row.unit_seconds) << " s/setting, "
                  << shgs::fmt_g6(row.total_hours) << " h total\n";
    std::cout << "overall: " << shgs::fmt_g6(summary.overall_hours) << " h -> " << out_path
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-hyperparameter grid search for dense feed-forward binary classifiers"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "run one sweep and write results + plots");
    run->add_option("--config", run_flags.config_path, "config file (key = value, [space] section)");
    run->add_option("--dataset", run_flags.dataset, "dataset CSV path");
    run->add_option("--target", run_flags.target,
                    "target hyperparameter (epochs, batch_size, learning_rate, dropout, "
                    "momentum, decay, l1, l2)");
    run->add_option("--target-column", run_flags.target_column, "label column name");
    run->add_option("--positive-label", run_flags.positive_label, "positive class value");
    run->add_option("--iterations", run_flags.iterations, "background settings to draw");
    run->add_option("--seed", run_flags.seed, "master seed");
    run->add_option("--test-fraction", run_flags.test_fraction, "holdout fraction");
    run->add_option("--folds", run_flags.folds, "cross-validation folds");
    run->add_option("--threads", run_flags.threads, "worker threads");
    run->add_option("--out", run_flags.output_dir, "output directory");
    run->add_option("--set", run_flags.overrides,
                    "space override, e.g. epochs=5:101:3 or optimizer=sgd,adam (repeatable)");
    run->add_flag("--no-plots", run_flags.no_plots, "skip SVG rendering");

    std::string rec_target, rec_results;
    int rec_n_train = 0;
    auto* recommend = app.add_subcommand("recommend", "print the reduced-range rule for a target");
    recommend->add_option("--target", rec_target, "target hyperparameter")->required();
    recommend->add_option("--n-train", rec_n_train, "training partition size (batch_size rule)");
    recommend->add_option("--results", rec_results, "results CSV for the empirical range");

    std::string plot_results, plot_y = "test_auc", plot_out = ".";
    auto* plot = app.add_subcommand("plot", "re-render scatter SVGs from a results CSV");
    plot->add_option("--results", plot_results, "results CSV")->required();
    plot->add_option("--y", plot_y, "y field: test_auc or runtime");
    plot->add_option("--out", plot_out, "output directory");

    std::vector<std::string> timing_inputs;
    std::string timing_out = "timing.csv";
    auto* timing = app.add_subcommand("timing", "summarize running time across results CSVs");
    timing->add_option("results", timing_inputs, "results CSV files")->required();
    timing->add_option("--out", timing_out, "output CSV path");

    try {
        app.parse(argc, argv);
        if (*run) return cmd_run(run_flags);
        if (*recommend) return cmd_recommend(rec_target, rec_n_train, rec_results);
        if (*plot) return cmd_plot(plot_results, plot_y, plot_out);
        if (*timing) return cmd_timing(timing_inputs, timing_out);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const shgs::usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const shgs::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
}
