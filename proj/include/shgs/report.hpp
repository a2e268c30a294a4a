#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "shgs/common.hpp"
#include "shgs/engine.hpp"

namespace shgs {

// Fixed column order of the full hyperparameter tuple; results files carry
// one column per background (non-target) hyperparameter in this order.
inline std::vector<std::string> background_column_names(TargetHyperparameter target) {
    static const std::vector<std::string> all = {
        "epochs",        "batch_size",  "learning_rate", "dropout",
        "momentum",      "decay",       "l1",            "l2",
        "hidden_layers", "hidden_nodes", "optimizer",    "initializer",
        "input_activation", "hidden_activation"};
    std::vector<std::string> out;
    for (const auto& name : all)
        if (name != to_string(target)) out.push_back(name);
    return out;
}

namespace detail {

inline std::string background_field(const BackgroundSetting& bg, const std::string& column) {
    const auto& s = bg.base;
    if (column == "epochs") return std::to_string(s.epochs);
    if (column == "batch_size") return std::to_string(s.batch_size);
    if (column == "learning_rate") return fmt_g6(s.learning_rate);
    if (column == "dropout") return fmt_g6(s.dropout);
    if (column == "momentum") return s.momentum ? fmt_g6(*s.momentum) : std::string{};
    if (column == "decay") return fmt_g6(s.decay);
    if (column == "l1") return fmt_g6(s.l1);
    if (column == "l2") return fmt_g6(s.l2);
    if (column == "hidden_layers") return std::to_string(s.hidden_layers);
    if (column == "hidden_nodes") return std::to_string(s.hidden_nodes);
    if (column == "optimizer") return to_string(s.optimizer);
    if (column == "initializer") return to_string(s.initializer);
    if (column == "input_activation") return to_string(s.input_activation);
    if (column == "hidden_activation") return to_string(s.hidden_activation);
    throw std::invalid_argument("unknown background column: " + column);
}

inline void set_background_field(BackgroundSetting& bg, const std::string& column,
                                 const std::string& value) {
    auto& s = bg.base;
    if (column == "epochs") s.epochs = std::stoi(value);
    else if (column == "batch_size") s.batch_size = std::stoi(value);
    else if (column == "learning_rate") s.learning_rate = std::stod(value);
    else if (column == "dropout") s.dropout = std::stod(value);
    else if (column == "momentum") {
        if (value.empty()) s.momentum.reset();
        else s.momentum = std::stod(value);
    } else if (column == "decay") s.decay = std::stod(value);
    else if (column == "l1") s.l1 = std::stod(value);
    else if (column == "l2") s.l2 = std::stod(value);
    else if (column == "hidden_layers") s.hidden_layers = std::stoi(value);
    else if (column == "hidden_nodes") s.hidden_nodes = std::stoi(value);
    else if (column == "optimizer") s.optimizer = parse_optimizer(value);
    else if (column == "initializer") s.initializer = parse_initializer(value);
    else if (column == "input_activation") s.input_activation = parse_activation(value);
    else if (column == "hidden_activation") s.hidden_activation = parse_activation(value);
    else throw data_error("unknown background column: " + column);
}

}  // namespace detail

// Writes the trial table: the fixed metric header, then one background
// column per non-target hyperparameter, rows sorted by (iteration,
// target_value), reals at 6 significant digits.
inline void write_results_csv(const SweepReport& report, const std::filesystem::path& path) {
    if (report.records.empty()) throw data_error("write_results_csv: empty report");
    std::ofstream out(path);
    if (!out) throw io_error("cannot write results file: " + path.string());

    const auto bg_columns = background_column_names(report.target);
    out << "iteration,target_name,target_value,mean_train_auc,mean_test_auc,test_auc,"
           "runtime_seconds,status";
    for (const auto& c : bg_columns) out << ',' << c;
    out << '\n';

    for (const auto& rec : report.records) {
        out << rec.iteration_id << ',' << to_string(report.target) << ','
            << fmt_g6(rec.target_value) << ',' << fmt_g6(rec.result.mean_train_auc) << ','
            << fmt_g6(rec.result.mean_test_auc) << ',' << fmt_g6(rec.result.test_auc) << ','
            << fmt_g6(rec.result.runtime_seconds) << ',' << to_string(rec.result.status);
        for (const auto& c : bg_columns) out << ',' << detail::background_field(rec.background, c);
        out << '\n';
    }
    if (!out) throw io_error("write failed: " + path.string());
}

// Reads a results file back into a report. The sweep metadata that is not
// stored in the file (master seed) is left zeroed; the dataset name
// defaults to the file stem.
inline SweepReport read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open results file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw data_error(path.string() + ": empty results file");

    auto header = detail::split_csv_line(line);
    constexpr std::size_t n_fixed = 8;
    if (header.size() < n_fixed || header[0] != "iteration" || header[1] != "target_name")
        throw data_error(path.string() + ": not a results file");

    SweepReport report;
    report.dataset_name = path.stem().string();
    bool target_known = false;

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != header.size())
            throw data_error(path.string() + ": malformed row: " + line);
        if (!target_known) {
            report.target = parse_target(f[1]);
            target_known = true;
        }
        TrialRecord rec;
        rec.iteration_id = std::stoi(f[0]);
        rec.target_value = std::stod(f[2]);
        rec.result.mean_train_auc = std::stod(f[3]);
        rec.result.mean_test_auc = std::stod(f[4]);
        rec.result.test_auc = std::stod(f[5]);
        rec.result.runtime_seconds = std::stod(f[6]);
        rec.result.status = (f[7] == "diverged") ? TrialStatus::diverged : TrialStatus::ok;
        rec.background.target = report.target;
        for (std::size_t i = n_fixed; i < header.size(); ++i)
            detail::set_background_field(rec.background, header[i], f[i]);
        report.records.push_back(std::move(rec));
    }
    if (report.records.empty()) throw data_error(path.string() + ": no trial rows");

    for (const auto& r : report.records) {
        report.iterations = std::max(report.iterations, r.iteration_id + 1);
        if (std::find(report.values.begin(), report.values.end(), r.target_value) ==
            report.values.end())
            report.values.push_back(r.target_value);
        report.total_runtime_seconds += r.result.runtime_seconds;
    }
    std::sort(report.values.begin(), report.values.end());
    return report;
}

enum class PlotField { test_auc, runtime };

inline const char* to_string(PlotField f) {
    return f == PlotField::test_auc ? "test_auc" : "runtime";
}

namespace detail {

struct PanelGeometry {
    static constexpr double width = 600, height = 440;
    static constexpr double left = 70, right = 580, top = 40, bottom = 390;

    double x_lo, x_hi, y_lo, y_hi;

    double x(double v) const {
        if (x_hi == x_lo) return 0.5 * (left + right);
        return left + (v - x_lo) / (x_hi - x_lo) * (right - left);
    }
    double y(double v) const {
        if (y_hi == y_lo) return 0.5 * (top + bottom);
        return bottom - (v - y_lo) / (y_hi - y_lo) * (bottom - top);
    }
};

inline std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

// One axes panel with the trial points of a single iteration, emitted into
// a <g> so the combined figure can translate it onto a grid.
inline void render_panel(std::ostream& out, const SweepReport& report, PlotField field,
                         int iteration, const PanelGeometry& geo, const std::string& title) {
    out << "<rect x=\"" << geo.left << "\" y=\"" << geo.top << "\" width=\""
        << geo.right - geo.left << "\" height=\"" << geo.bottom - geo.top
        << "\" fill=\"white\" stroke=\"black\"/>\n";
    out << "<text x=\"" << 0.5 * (geo.left + geo.right) << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << svg_escape(title) << "</text>\n";

    constexpr int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = geo.x_lo + (geo.x_hi - geo.x_lo) * i / n_ticks;
        const double px = geo.x(fx);
        out << "<line x1=\"" << px << "\" y1=\"" << geo.bottom << "\" x2=\"" << px << "\" y2=\""
            << geo.bottom + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << geo.bottom + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_g6(fx) << "</text>\n";
        const double fy = geo.y_lo + (geo.y_hi - geo.y_lo) * i / n_ticks;
        const double py = geo.y(fy);
        out << "<line x1=\"" << geo.left - 5 << "\" y1=\"" << py << "\" x2=\"" << geo.left
            << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << geo.left - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_g6(fy)
            << "</text>\n";
    }
    out << "<text x=\"" << 0.5 * (geo.left + geo.right) << "\" y=\""
        << PanelGeometry::height - 10 << "\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"13\">" << to_string(report.target)
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << 0.5 * (geo.top + geo.bottom)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << 0.5 * (geo.top + geo.bottom) << ")\">"
        << (field == PlotField::test_auc ? "test_auc" : "running time (s)") << "</text>\n";

    for (const auto& rec : report.records) {
        if (rec.iteration_id != iteration) continue;
        const double v = field == PlotField::test_auc ? rec.result.test_auc
                                                      : rec.result.runtime_seconds;
        out << "<circle cx=\"" << geo.x(rec.target_value) << "\" cy=\"" << geo.y(v)
            << "\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.6\"/>\n";
    }
}

inline PanelGeometry panel_geometry(const SweepReport& report, PlotField field) {
    PanelGeometry geo{};
    geo.x_lo = report.values.front();
    geo.x_hi = report.values.back();
    if (field == PlotField::test_auc) {
        geo.y_lo = 0.0;  // AUC axis is always the full unit interval
        geo.y_hi = 1.0;
    } else {
        geo.y_lo = 0.0;
        geo.y_hi = 0.0;
        for (const auto& r : report.records)
            geo.y_hi = std::max(geo.y_hi, r.result.runtime_seconds);
        if (geo.y_hi == 0.0) geo.y_hi = 1.0;
        geo.y_hi *= 1.05;
    }
    return geo;
}

}  // namespace detail

// Renders one SVG per iteration plus a combined grid figure. Returns the
// written paths (per-iteration files first, the combined figure last).
inline std::vector<std::filesystem::path> render_scatter(const SweepReport& report,
                                                         PlotField field,
                                                         const std::filesystem::path& out_dir) {
    if (report.records.empty()) throw data_error("render_scatter: empty report");
    std::filesystem::create_directories(out_dir);
    const auto geo = detail::panel_geometry(report, field);
    const std::string stem =
        std::string("scatter_") + to_string(report.target) + "_" + to_string(field);

    std::vector<std::filesystem::path> written;
    for (int i = 0; i < report.iterations; ++i) {
        const auto path = out_dir / (stem + "_iter" + std::to_string(i) + ".svg");
        std::ofstream out(path);
        if (!out) throw io_error("cannot write plot: " + path.string());
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
            << detail::PanelGeometry::width << "\" height=\"" << detail::PanelGeometry::height
            << "\">\n";
        detail::render_panel(out, report, field, i,
                             geo, report.dataset_name + " / iteration " + std::to_string(i + 1));
        out << "</svg>\n";
        written.push_back(path);
    }

    const int cols = 2;
    const int rows = (report.iterations + cols - 1) / cols;
    const auto path = out_dir / (stem + "_all.svg");
    std::ofstream out(path);
    if (!out) throw io_error("cannot write plot: " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << cols * detail::PanelGeometry::width << "\" height=\""
        << rows * detail::PanelGeometry::height << "\">\n";
    for (int i = 0; i < report.iterations; ++i) {
        const double tx = (i % cols) * detail::PanelGeometry::width;
        const double ty = (i / cols) * detail::PanelGeometry::height;
        out << "<g transform=\"translate(" << tx << ' ' << ty << ")\">\n";
        detail::render_panel(out, report, field, i, geo,
                             report.dataset_name + " / iteration " + std::to_string(i + 1));
        out << "</g>\n";
    }
    out << "</svg>\n";
    written.push_back(path);
    return written;
}

// Tables 3/4-shaped accounting: per dataset the setting count, mean
// seconds per setting, and total hours; per target the hours per dataset
// and overall.
struct TimingSummary {
    struct DatasetRow {
        std::string dataset;
        std::size_t settings = 0;
        double unit_seconds = 0.0;
        double total_hours = 0.0;
    };
    struct TargetRow {
        std::string target;
        double total_hours = 0.0;
        std::vector<double> hours_per_dataset;  // aligned with dataset_names
    };
    std::vector<std::string> dataset_names;
    std::vector<DatasetRow> per_dataset;
    std::vector<TargetRow> per_target;
    double overall_hours = 0.0;
};

inline TimingSummary timing_summary(const std::vector<SweepReport>& reports) {
    TimingSummary summary;
    for (const auto& rep : reports)
        if (std::find(summary.dataset_names.begin(), summary.dataset_names.end(),
                      rep.dataset_name) == summary.dataset_names.end())
            summary.dataset_names.push_back(rep.dataset_name);

    std::map<std::string, TimingSummary::DatasetRow> by_dataset;
    std::map<std::string, TimingSummary::TargetRow> by_target;
    for (const auto& rep : reports) {
        double seconds = 0.0;
        for (const auto& rec : rep.records) seconds += rec.result.runtime_seconds;

        auto& drow = by_dataset[rep.dataset_name];
        drow.dataset = rep.dataset_name;
        drow.settings += rep.records.size();
        drow.unit_seconds += seconds;  // running total; divided below

        auto& trow = by_target[to_string(rep.target)];
        trow.target = to_string(rep.target);
        trow.hours_per_dataset.resize(summary.dataset_names.size(), 0.0);
        const auto d = static_cast<std::size_t>(
            std::find(summary.dataset_names.begin(), summary.dataset_names.end(),
                      rep.dataset_name) -
            summary.dataset_names.begin());
        trow.hours_per_dataset[d] += seconds / 3600.0;
        trow.total_hours += seconds / 3600.0;

        summary.overall_hours += seconds / 3600.0;
    }

    for (auto& [name, row] : by_dataset) {
        row.total_hours = row.unit_seconds / 3600.0;
        row.unit_seconds = row.settings ? row.unit_seconds / static_cast<double>(row.settings) : 0.0;
        summary.per_dataset.push_back(row);
    }
    for (auto& [name, row] : by_target) {
        row.hours_per_dataset.resize(summary.dataset_names.size(), 0.0);
        summary.per_target.push_back(row);
    }
    return summary;
}

inline void write_timing_csv(const TimingSummary& summary, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write timing file: " + path.string());
    out << "dataset,settings,unit_seconds,total_hours\n";
    for (const auto& row : summary.per_dataset)
        out << row.dataset << ',' << row.settings << ',' << fmt_g6(row.unit_seconds) << ','
            << fmt_g6(row.total_hours) << '\n';
    out << '\n';
    out << "target,total_hours";
    for (const auto& name : summary.dataset_names) out << ',' << name;
    out << '\n';
    for (const auto& row : summary.per_target) {
        out << row.target << ',' << fmt_g6(row.total_hours);
        for (double h : row.hours_per_dataset) out << ',' << fmt_g6(h);
        out << '\n';
    }
    if (!out) throw io_error("write failed: " + path.string());
}

}  // namespace shgs
