// fnc: confidence bounds for the fraction of a normal population
// nonconforming quality-specification limits.
//
// Exit codes: 0 success, 1 I/O or internal error, 2 flag/domain error,
// 3 solver convergence failure, 4 reference-table deviation beyond tolerance
// (table --diff), 5 empirical coverage outside the acceptance band (verify).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fnc/errors.hpp"
#include "fnc/fnc_bounds.hpp"
#include "fnc/mc_verify.hpp"
#include "fnc/qc_tables.hpp"

namespace {

using nlohmann::json;

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

json tail_to_json(const fnc::TailBounds& tb) {
    return json{{"expected", tb.expected},
                {"lower", tb.lower},
                {"upper", tb.upper},
                {"delta_hat_lower", tb.delta_hat_lower},
                {"delta_hat_upper", tb.delta_hat_upper},
                {"expected_underflow", tb.expected_underflow},
                {"lower_underflow", tb.lower_underflow},
                {"upper_underflow", tb.upper_underflow}};
}

json row_to_json(const fnc::TableRow& row) {
    const bool uf = row.lsl.expected_underflow || row.lsl.lower_underflow ||
                    row.lsl.upper_underflow || row.usl.expected_underflow ||
                    row.usl.lower_underflow || row.usl.upper_underflow;
    return json{{"mean", row.mean},
                {"sd", row.sd},
                {"lsl_expected", row.lsl.expected},
                {"lsl_lower", row.lsl.lower},
                {"lsl_upper", row.lsl.upper},
                {"usl_expected", row.usl.expected},
                {"usl_lower", row.usl.lower},
                {"usl_upper", row.usl.upper},
                {"underflow", uf ? 1 : 0}};
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit OutputTarget(const std::string& path) {
        if (!path.empty() && path != "-") {
            file.open(path);
            if (!file) {
                throw std::runtime_error("cannot open output file: " + path);
            }
            os = &file;
        }
    }
};

int run_bounds(double mean, double sd, int n, double true_value, double taae, double gamma,
               const std::string& format) {
    const fnc::SampleSummary sample(n, mean, sd);
    const fnc::QualitySpec spec = fnc::make_quality_spec(true_value, taae);
    const fnc::BoundsReport report = fnc::bounds_report(sample, spec, gamma);

    if (format == "json") {
        json j{{"n", sample.n},
               {"mean", sample.mean},
               {"sd", sample.sd},
               {"true_value", spec.true_value},
               {"e_max", spec.e_max},
               {"lsl", spec.lsl},
               {"usl", spec.usl},
               {"gamma", report.gamma},
               {"lower_tail", tail_to_json(report.lower_tail)},
               {"upper_tail", tail_to_json(report.upper_tail)}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    if (format == "csv") {
        fnc::TableRow row;
        row.mean = sample.mean;
        row.sd = sample.sd;
        row.lsl = report.lower_tail;
        row.usl = report.upper_tail;
        fnc::export_table({row}, std::cout);
        return 0;
    }
    std::cout << "sample: n=" << sample.n << " mean=" << sample.mean << " sd=" << sample.sd
              << "\nspec:   lsl=" << spec.lsl << " usl=" << spec.usl << " (true value "
              << spec.true_value << ", taae " << spec.e_max << ")\ngamma:  " << report.gamma
              << "\n\n";
    const auto print_tail = [](const char* name, const fnc::TailBounds& tb) {
        std::cout << name << ":\n  expected " << fmt6(tb.expected) << (tb.expected_underflow ? " (underflow)" : "")
                  << "\n  lower    " << fmt6(tb.lower) << (tb.lower_underflow ? " (underflow)" : "")
                  << "\n  upper    " << fmt6(tb.upper) << (tb.upper_underflow ? " (underflow)" : "")
                  << "\n  delta_hat lower/upper " << fmt6(tb.delta_hat_lower) << " / "
                  << fmt6(tb.delta_hat_upper) << "\n";
    };
    print_tail("fraction below lsl", report.lower_tail);
    print_tail("fraction above usl", report.upper_tail);
    return 0;
}

int run_table(int which, const std::string& format, const std::string& out_path,
              const std::string& diff_path) {
    const std::vector<fnc::TableRow> rows = fnc::reference_table(which);

    OutputTarget target(out_path);
    if (format == "json") {
        json j = json::array();
        for (const auto& row : rows) j.push_back(row_to_json(row));
        *target.os << j.dump(2) << '\n';
    } else if (format == "text") {
        *target.os << "mean    sd      lsl expected/lower/upper          usl expected/lower/upper\n";
        for (const auto& row : rows) {
            char line[256];
            std::snprintf(line, sizeof line, "%-7.2f %-7.2f %s %s %s  %s %s %s\n", row.mean,
                          row.sd, fmt6(row.lsl.expected).c_str(), fmt6(row.lsl.lower).c_str(),
                          fmt6(row.lsl.upper).c_str(), fmt6(row.usl.expected).c_str(),
                          fmt6(row.usl.lower).c_str(), fmt6(row.usl.upper).c_str());
            *target.os << line;
        }
    } else {
        fnc::export_table(rows, *target.os);
    }

    if (!diff_path.empty()) {
        std::ifstream in(diff_path);
        if (!in) {
            throw std::runtime_error("cannot open reference file: " + diff_path);
        }
        const std::vector<fnc::TableRow> ref = fnc::load_table_csv(in);
        const fnc::DiffResult diff = fnc::diff_tables(rows, ref);
        for (const auto& f : diff.failures) {
            std::cerr << "deviation at (" << f.mean << ", " << f.sd << ") " << f.cell
                      << ": computed " << fmt6(f.computed) << " reference " << fmt6(f.reference)
                      << " rel " << f.rel_error << '\n';
        }
        int rows_failed = 0;
        double last_mean = -1.0, last_sd = -1.0;
        for (const auto& f : diff.failures) {
            if (f.mean != last_mean || f.sd != last_sd) {
                ++rows_failed;
                last_mean = f.mean;
                last_sd = f.sd;
            }
        }
        const int rows_total = static_cast<int>(ref.size());
        std::cerr << (rows_total - rows_failed) << "/" << rows_total << " rows within tolerance ("
                  << diff.cells_compared << " cells, " << diff.cells_failed
                  << " beyond tolerance)\n";
        if (diff.cells_failed > 0) {
            return 4;
        }
    }
    return 0;
}

int run_sweep(const fnc::GridSpec& grid, const std::string& tail_name, int jobs,
              const std::string& out_path, const std::string& format) {
    const std::vector<fnc::TableRow> rows = fnc::sweep(grid, jobs);
    OutputTarget target(out_path);
    if (format == "json") {
        json j = json::array();
        for (const auto& row : rows) j.push_back(row_to_json(row));
        *target.os << j.dump(2) << '\n';
        return 0;
    }
    if (tail_name == "both") {
        fnc::export_table(rows, *target.os);
    } else {
        const fnc::Tail tail =
            tail_name == "upper-limit" ? fnc::Tail::upper_limit : fnc::Tail::lower_limit;
        fnc::export_surface(rows, tail, *target.os);
    }
    return 0;
}

int run_verify(const fnc::CoverageConfig& cfg, const std::string& kind_name, int jobs) {
    fnc::BoundKind kind;
    if (kind_name == "upper-lower-tail") kind = fnc::BoundKind::upper_lower_tail;
    else if (kind_name == "lower-lower-tail") kind = fnc::BoundKind::lower_lower_tail;
    else if (kind_name == "upper-upper-tail") kind = fnc::BoundKind::upper_upper_tail;
    else if (kind_name == "lower-upper-tail") kind = fnc::BoundKind::lower_upper_tail;
    else throw std::domain_error("verify: unknown --kind " + kind_name);

    const fnc::CoverageResult res = fnc::simulate_coverage(cfg, kind, jobs);
    const bool pass = std::fabs(res.empirical_coverage - cfg.gamma) <= 0.01;
    std::cout << "trials " << res.trials << ", hits " << res.hits << ", solver failures "
              << res.solver_failures << "\nempirical coverage " << res.empirical_coverage
              << " (target " << cfg.gamma << ", band +-0.01)\nstandard error "
              << res.standard_error << "\n"
              << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confidence bounds for the fraction nonconforming of normal populations"};
    app.require_subcommand(1);

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Bounds for a single sample summary");
    double mean = 0.0, sd = 0.0, true_value = 0.0, taae = 0.0, gamma = 0.95;
    int n = 0;
    std::string format = "text";
    bounds->add_option("--mean", mean, "Sample mean")->required();
    bounds->add_option("--sd", sd, "Sample standard deviation")->required();
    bounds->add_option("--n", n, "Sample size")->required();
    bounds->add_option("--true-value", true_value, "Assigned value of the measurand")->required();
    bounds->add_option("--taae", taae, "Total allowable analytical error (ratio)")->required();
    bounds->add_option("--gamma", gamma, "One-sided confidence level");
    bounds->add_option("--format", format, "text|csv|json")
        ->check(CLI::IsMember({"text", "csv", "json"}));

    // table
    auto* table = app.add_subcommand("table", "Reproduce one of the reference tables 2-5");
    int which = 0;
    std::string out_path;
    std::string diff_path;
    std::string table_format = "csv";
    table->add_option("--which", which, "Table number (2-5)")->required();
    table->add_option("--format", table_format, "text|csv|json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    table->add_option("--out", out_path, "Output file (default stdout)");
    table->add_option("--diff", diff_path, "Compare against a reference CSV; exit 4 on deviation");

    // sweep
    auto* sw = app.add_subcommand("sweep", "Grid sweep and CSV surface export");
    fnc::GridSpec grid;
    grid.mean_start = 100.0; grid.mean_stop = 106.0; grid.mean_step = 0.1;
    grid.sd_start = 0.1; grid.sd_stop = 6.0; grid.sd_step = 0.1;
    grid.n = 20; grid.true_value = 100.0; grid.e_max = 0.10; grid.gamma = 0.95;
    std::string preset;
    std::string tail_name = "lower-limit";
    std::string sweep_out;
    std::string sweep_format = "csv";
    int jobs = 1;
    sw->add_option("--preset", preset,
                   "table1-col1|table1-col2|table1-col3|table1-col4 (full published grids)")
        ->check(CLI::IsMember({"table1-col1", "table1-col2", "table1-col3", "table1-col4"}));
    sw->add_option("--mean-start", grid.mean_start);
    sw->add_option("--mean-stop", grid.mean_stop);
    sw->add_option("--mean-step", grid.mean_step);
    sw->add_option("--sd-start", grid.sd_start);
    sw->add_option("--sd-stop", grid.sd_stop);
    sw->add_option("--sd-step", grid.sd_step);
    sw->add_option("--n", grid.n);
    sw->add_option("--true-value", grid.true_value);
    sw->add_option("--taae", grid.e_max);
    sw->add_option("--gamma", grid.gamma);
    sw->add_option("--tail", tail_name, "lower-limit|upper-limit|both")
        ->check(CLI::IsMember({"lower-limit", "upper-limit", "both"}));
    sw->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
    sw->add_option("--out", sweep_out, "Output file (default stdout)");
    sw->add_option("--format", sweep_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    // verify
    auto* verify = app.add_subcommand("verify", "Monte Carlo coverage check of the bounds");
    fnc::CoverageConfig cfg;
    std::string kind_name;
    std::optional<double> limit;
    std::optional<double> v_taae;
    std::optional<double> v_true_value;
    long trials = 10000;
    std::uint64_t seed = 0;
    int vjobs = 1;
    verify->add_option("--mu", cfg.mu, "True mean")->required();
    verify->add_option("--sigma", cfg.sigma, "True standard deviation")->required();
    verify->add_option("--n", cfg.n, "Sample size per trial")->required();
    verify->add_option("--limit", limit, "Specification limit");
    verify->add_option("--taae", v_taae, "Derive the limit from taae and --true-value");
    verify->add_option("--true-value", v_true_value, "Assigned value for --taae");
    verify->add_option("--gamma", cfg.gamma, "Confidence level")->required();
    verify->add_option("--trials", trials, "Number of trials")->required();
    verify->add_option("--seed", seed, "Random seed");
    verify->add_option("--kind", kind_name,
                       "upper-lower-tail|lower-lower-tail|upper-upper-tail|lower-upper-tail")
        ->required();
    verify->add_option("--jobs", vjobs, "Worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);

        if (bounds->parsed()) {
            return run_bounds(mean, sd, n, true_value, taae, gamma, format);
        }
        if (table->parsed()) {
            return run_table(which, table_format, out_path, diff_path);
        }
        if (sw->parsed()) {
            if (!preset.empty()) {
                grid.mean_start = 100.0; grid.mean_stop = 106.0; grid.mean_step = 0.1;
                grid.sd_start = 0.1; grid.sd_stop = 6.0; grid.sd_step = 0.1;
                grid.true_value = 100.0; grid.gamma = 0.95;
                if (preset == "table1-col1") { grid.n = 20; grid.e_max = 0.10; }
                if (preset == "table1-col2") { grid.n = 40; grid.e_max = 0.10; }
                if (preset == "table1-col3") { grid.n = 20; grid.e_max = 0.20; }
                if (preset == "table1-col4") { grid.n = 40; grid.e_max = 0.20; }
            }
            return run_sweep(grid, tail_name, jobs, sweep_out, sweep_format);
        }
        if (verify->parsed()) {
            if (limit.has_value()) {
                cfg.limit = *limit;
            } else if (v_taae.has_value() && v_true_value.has_value()) {
                const fnc::QualitySpec spec = fnc::make_quality_spec(*v_true_value, *v_taae);
                const bool lower = kind_name == "upper-lower-tail" || kind_name == "lower-lower-tail";
                cfg.limit = lower ? spec.lsl : spec.usl;
            } else {
                throw std::domain_error("verify: give --limit or both --taae and --true-value");
            }
            cfg.trials = trials;
            cfg.seed = seed;
            return run_verify(cfg, kind_name, vjobs);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const fnc::convergence_error& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
