#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fnc/fnc_bounds.hpp"

namespace fnc {

// Rectangular sweep over (mean, sd), one bounds computation per lattice point.
struct GridSpec {
    double mean_start = 0.0;
    double mean_stop = 0.0;
    double mean_step = 1.0;
    double sd_start = 1.0;
    double sd_stop = 1.0;
    double sd_step = 1.0;
    int n = 2;
    double true_value = 1.0;
    double e_max = 0.5;
    double gamma = 0.95;
};

struct TableRow {
    double mean = 0.0;
    double sd = 0.0;
    TailBounds lsl;  // fraction nonconforming the lower specification limit
    TailBounds usl;  // fraction nonconforming the upper specification limit
    bool ok = true;
    std::string error;  // solver diagnostics when !ok; the sweep never aborts
};

// One-sided confidence level that reproduces the bundled reference tables
// (golden/table2..5.csv). The source publication labels them 95%, but its
// printed bounds correspond to one-sided 0.90 (each bound of a two-sided 90%
// pair); see the data notes in the README.
inline constexpr double kReferenceTableOneSidedLevel = 0.90;

// Lattice points start + i*step, i = 0..count-1, with count computed under a
// 1e-9 step-rounding guard. Throws std::domain_error on step <= 0 or
// stop < start.
std::vector<double> grid_axis(double start, double stop, double step);

// Row-major sweep (mean outer, sd inner), serial reference implementation.
// Per-cell solver failures are recorded in the row, never thrown.
std::vector<TableRow> sweep_serial(const GridSpec& grid);

// OpenMP sweep; bit-identical to sweep_serial for any jobs value.
// jobs <= 0 means all available threads.
std::vector<TableRow> sweep(const GridSpec& grid, int jobs = 0);

// The four published 30-row reference grids: means 100..105 step 1,
// sd 1..5 step 1, with (n, e_max) = (20,0.10), (40,0.10), (20,0.20),
// (40,0.20) for which = 2,3,4,5, evaluated at kReferenceTableOneSidedLevel.
std::vector<TableRow> reference_table(int which);

enum class Tail { lower_limit, upper_limit };

// CSV surface for one tail: header mean,sd,expected,lower,upper,underflow,
// fields in %.6e scientific notation, underflowed cells printed as 0.000000e0
// with the row flag set.
void export_surface(const std::vector<TableRow>& rows, Tail tail, std::ostream& os);

// CSV with both tails: header mean,sd,lsl_expected,lsl_lower,lsl_upper,
// usl_expected,usl_lower,usl_upper,underflow.
void export_table(const std::vector<TableRow>& rows, std::ostream& os);

// Parses either CSV layout back into rows. Accepts comma or point decimal
// separators in numeric fields (the source tables use comma decimals) and
// tolerates a missing underflow column.
std::vector<TableRow> load_table_csv(std::istream& is);

struct CellDeviation {
    double mean = 0.0;
    double sd = 0.0;
    std::string cell;
    double computed = 0.0;
    double reference = 0.0;
    double rel_error = 0.0;
};

struct DiffResult {
    int cells_compared = 0;
    int cells_failed = 0;
    std::vector<CellDeviation> failures;
};

// Compares the six probability cells of matching (mean, sd) rows at the given
// relative tolerance. Rows present in only one input count as failures.
DiffResult diff_tables(const std::vector<TableRow>& computed,
                       const std::vector<TableRow>& reference, double rel_tol = 1e-2);

}  // namespace fnc
