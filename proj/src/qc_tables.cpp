#include "fnc/qc_tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fnc {

namespace {

void format_cell(char* buf, std::size_t size, double value, bool underflow) {
    if (underflow) {
        std::snprintf(buf, size, "0.000000e0");
    } else {
        std::snprintf(buf, size, "%.6e", value);
    }
}

TableRow compute_row(const GridSpec& grid, double mean, double sd) {
    TableRow row;
    row.mean = mean;
    row.sd = sd;
    try {
        const SampleSummary sample(grid.n, mean, sd);
        const QualitySpec spec = make_quality_spec(grid.true_value, grid.e_max);
        row.lsl = lower_tail_bounds(sample, spec.lsl, grid.gamma);
        row.usl = upper_tail_bounds(sample, spec.usl, grid.gamma);
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

double parse_number(std::string field) {
    for (char& c : field) {
        if (c == ',') c = '.';
    }
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos == 0) {
        throw std::runtime_error("load_table_csv: unparsable field '" + field + "'");
    }
    return v;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

// Comma-decimal data (the source tables' locale) must be tab- or
// semicolon-separated to stay unambiguous; plain CSV uses point decimals.
char infer_separator(const std::string& header) {
    if (header.find('\t') != std::string::npos) return '\t';
    if (header.find(';') != std::string::npos) return ';';
    return ',';
}

}  // namespace

std::vector<double> grid_axis(double start, double stop, double step) {
    if (!(step > 0.0)) {
        throw std::domain_error("grid_axis: step must be positive");
    }
    if (stop < start) {
        throw std::domain_error("grid_axis: stop must be >= start");
    }
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> pts(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        pts[static_cast<std::size_t>(i)] = start + static_cast<double>(i) * step;
    }
    return pts;
}

std::vector<TableRow> sweep_serial(const GridSpec& grid) {
    const std::vector<double> means = grid_axis(grid.mean_start, grid.mean_stop, grid.mean_step);
    const std::vector<double> sds = grid_axis(grid.sd_start, grid.sd_stop, grid.sd_step);
    std::vector<TableRow> rows(means.size() * sds.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        for (std::size_t j = 0; j < sds.size(); ++j) {
            rows[i * sds.size() + j] = compute_row(grid, means[i], sds[j]);
        }
    }
    return rows;
}

std::vector<TableRow> sweep(const GridSpec& grid, int jobs) {
#ifdef _OPENMP
    if (jobs != 1) {
        const std::vector<double> means =
            grid_axis(grid.mean_start, grid.mean_stop, grid.mean_step);
        const std::vector<double> sds = grid_axis(grid.sd_start, grid.sd_stop, grid.sd_step);
        std::vector<TableRow> rows(means.size() * sds.size());
        const long total = static_cast<long>(rows.size());
        const int threads = jobs <= 0 ? omp_get_max_threads() : jobs;
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
        for (long k = 0; k < total; ++k) {
            const std::size_t i = static_cast<std::size_t>(k) / sds.size();
            const std::size_t j = static_cast<std::size_t>(k) % sds.size();
            rows[static_cast<std::size_t>(k)] = compute_row(grid, means[i], sds[j]);
        }
        return rows;
    }
#else
    (void)jobs;
#endif
    return sweep_serial(grid);
}

std::vector<TableRow> reference_table(int which) {
    GridSpec grid;
    grid.mean_start = 100.0;
    grid.mean_stop = 105.0;
    grid.mean_step = 1.0;
    grid.sd_start = 1.0;
    grid.sd_stop = 5.0;
    grid.sd_step = 1.0;
    grid.true_value = 100.0;
    grid.gamma = kReferenceTableOneSidedLevel;
    switch (which) {
        case 2: grid.n = 20; grid.e_max = 0.10; break;
        case 3: grid.n = 40; grid.e_max = 0.10; break;
        case 4: grid.n = 20; grid.e_max = 0.20; break;
        case 5: grid.n = 40; grid.e_max = 0.20; break;
        default:
            throw std::domain_error("reference_table: which must be 2, 3, 4 or 5");
    }
    return sweep_serial(grid);
}

void export_surface(const std::vector<TableRow>& rows, Tail tail, std::ostream& os) {
    if (rows.empty()) {
        throw std::domain_error("export_surface: rows must be nonempty");
    }
    os << "mean,sd,expected,lower,upper,underflow\n";
    char buf[32];
    for (const TableRow& row : rows) {
        const TailBounds& tb = tail == Tail::lower_limit ? row.lsl : row.usl;
        const bool uf = tb.expected_underflow || tb.lower_underflow || tb.upper_underflow;
        std::snprintf(buf, sizeof buf, "%.6e", row.mean);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.6e", row.sd);
        os << buf << ',';
        format_cell(buf, sizeof buf, tb.expected, tb.expected_underflow);
        os << buf << ',';
        format_cell(buf, sizeof buf, tb.lower, tb.lower_underflow);
        os << buf << ',';
        format_cell(buf, sizeof buf, tb.upper, tb.upper_underflow);
        os << buf << ',' << (uf ? 1 : 0) << '\n';
    }
    if (!os) {
        throw std::runtime_error("export_surface: write failed");
    }
}

void export_table(const std::vector<TableRow>& rows, std::ostream& os) {
    if (rows.empty()) {
        throw std::domain_error("export_table: rows must be nonempty");
    }
    os << "mean,sd,lsl_expected,lsl_lower,lsl_upper,usl_expected,usl_lower,usl_upper,underflow\n";
    char buf[32];
    for (const TableRow& row : rows) {
        const bool uf = row.lsl.expected_underflow || row.lsl.lower_underflow ||
                        row.lsl.upper_underflow || row.usl.expected_underflow ||
                        row.usl.lower_underflow || row.usl.upper_underflow;
        std::snprintf(buf, sizeof buf, "%.6e", row.mean);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.6e", row.sd);
        os << buf;
        const double cells[6] = {row.lsl.expected, row.lsl.lower, row.lsl.upper,
                                 row.usl.expected, row.usl.lower, row.usl.upper};
        const bool flags[6] = {row.lsl.expected_underflow, row.lsl.lower_underflow,
                               row.lsl.upper_underflow,    row.usl.expected_underflow,
                               row.usl.lower_underflow,    row.usl.upper_underflow};
        for (int c = 0; c < 6; ++c) {
            format_cell(buf, sizeof buf, cells[c], flags[c]);
            os << ',' << buf;
        }
        os << ',' << (uf ? 1 : 0) << '\n';
    }
    if (!os) {
        throw std::runtime_error("export_table: write failed");
    }
}

std::vector<TableRow> load_table_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw std::runtime_error("load_table_csv: empty input");
    }
    const char sep = infer_separator(line);
    const std::vector<std::string> header = split_fields(line, sep);
    const bool full = std::find(header.begin(), header.end(), "lsl_expected") != header.end();
    if (!full && std::find(header.begin(), header.end(), "expected") == header.end()) {
        throw std::runtime_error("load_table_csv: unrecognized header");
    }

    std::vector<TableRow> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_fields(line, sep);
        const std::size_t expect = full ? 8 : 5;
        if (f.size() < expect) {
            throw std::runtime_error("load_table_csv: short row '" + line + "'");
        }
        TableRow row;
        row.mean = parse_number(f[0]);
        row.sd = parse_number(f[1]);
        if (full) {
            row.lsl.expected = parse_number(f[2]);
            row.lsl.lower = parse_number(f[3]);
            row.lsl.upper = parse_number(f[4]);
            row.usl.expected = parse_number(f[5]);
            row.usl.lower = parse_number(f[6]);
            row.usl.upper = parse_number(f[7]);
        } else {
            row.lsl.expected = parse_number(f[2]);
            row.lsl.lower = parse_number(f[3]);
            row.lsl.upper = parse_number(f[4]);
            row.usl = row.lsl;
        }
        rows.push_back(row);
    }
    return rows;
}

DiffResult diff_tables(const std::vector<TableRow>& computed,
                       const std::vector<TableRow>& reference, double rel_tol) {
    static const char* kCellNames[6] = {"lsl_expected", "lsl_lower", "lsl_upper",
                                        "usl_expected", "usl_lower", "usl_upper"};
    DiffResult result;
    for (const TableRow& ref : reference) {
        const TableRow* match = nullptr;
        for (const TableRow& c : computed) {
            if (std::fabs(c.mean - ref.mean) < 1e-9 && std::fabs(c.sd - ref.sd) < 1e-9) {
                match = &c;
                break;
            }
        }
        const double ref_cells[6] = {ref.lsl.expected, ref.lsl.lower, ref.lsl.upper,
                                     ref.usl.expected, ref.usl.lower, ref.usl.upper};
        if (match == nullptr) {
            for (int c = 0; c < 6; ++c) {
                ++result.cells_compared;
                ++result.cells_failed;
                result.failures.push_back(
                    {ref.mean, ref.sd, kCellNames[c], std::nan(""), ref_cells[c], 1.0});
            }
            continue;
        }
        const double got_cells[6] = {match->lsl.expected, match->lsl.lower, match->lsl.upper,
                                     match->usl.expected, match->usl.lower, match->usl.upper};
        for (int c = 0; c < 6; ++c) {
            ++result.cells_compared;
            const double denom = std::max(std::fabs(ref_cells[c]),
                                          std::numeric_limits<double>::min());
            const double rel = std::fabs(got_cells[c] - ref_cells[c]) / denom;
            if (!(rel <= rel_tol)) {
                ++result.cells_failed;
                result.failures.push_back(
                    {ref.mean, ref.sd, kCellNames[c], got_cells[c], ref_cells[c], rel});
            }
        }
    }
    return result;
}

}  // namespace fnc
