#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fnc/qc_tables.hpp"
#include "support/checks.hpp"

using fnc::GridSpec;
using fnc::TableRow;
using testsupport::rel_err;

#ifndef FNC_GOLDEN_DIR
#define FNC_GOLDEN_DIR "golden"
#endif

namespace {

GridSpec small_grid() {
    GridSpec g;
    g.mean_start = 100.0;
    g.mean_stop = 102.0;
    g.mean_step = 1.0;
    g.sd_start = 1.0;
    g.sd_stop = 4.0;
    g.sd_step = 1.0;
    g.n = 20;
    g.true_value = 100.0;
    g.e_max = 0.10;
    g.gamma = 0.95;
    return g;
}

bool rows_bitwise_equal(const std::vector<TableRow>& a, const std::vector<TableRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double xs[] = {a[i].mean,        a[i].sd,           a[i].lsl.expected,
                             a[i].lsl.lower,   a[i].lsl.upper,    a[i].usl.expected,
                             a[i].usl.lower,   a[i].usl.upper};
        const double ys[] = {b[i].mean,        b[i].sd,           b[i].lsl.expected,
                             b[i].lsl.lower,   b[i].lsl.upper,    b[i].usl.expected,
                             b[i].usl.lower,   b[i].usl.upper};
        if (std::memcmp(xs, ys, sizeof xs) != 0 || a[i].ok != b[i].ok) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("grid_axis counts survive step rounding") {
    CHECK(fnc::grid_axis(100.0, 106.0, 0.1).size() == 61);
    CHECK(fnc::grid_axis(0.1, 6.0, 0.1).size() == 60);
    CHECK(fnc::grid_axis(5.0, 5.0, 1.0).size() == 1);
    CHECK(fnc::grid_axis(100.0, 105.0, 1.0).size() == 6);
    const auto pts = fnc::grid_axis(100.0, 106.0, 0.1);
    CHECK(pts.front() == 100.0);
    CHECK(rel_err(pts.back(), 106.0) < 1e-12);
    CHECK_THROWS_AS(fnc::grid_axis(0.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(fnc::grid_axis(1.0, 0.0, 0.5), std::domain_error);
}

TEST_CASE("sweep is row-major with mean as the outer loop") {
    const auto rows = fnc::sweep_serial(small_grid());
    REQUIRE(rows.size() == 12);
    CHECK(rows[0].mean == 100.0);
    CHECK(rows[0].sd == 1.0);
    CHECK(rows[3].mean == 100.0);
    CHECK(rows[3].sd == 4.0);
    CHECK(rows[4].mean == 101.0);
    CHECK(rows[4].sd == 1.0);
    for (const auto& r : rows) CHECK(r.ok);
}

TEST_CASE("degenerate single-point grid yields one row") {
    GridSpec g = small_grid();
    g.mean_stop = g.mean_start;
    g.sd_stop = g.sd_start;
    const auto rows = fnc::sweep_serial(g);
    CHECK(rows.size() == 1);
}

TEST_CASE("parallel sweep is bit-identical to the serial reference") {
    const auto serial = fnc::sweep_serial(small_grid());
    for (int jobs : {2, 3, 0}) {
        CAPTURE(jobs);
        CHECK(rows_bitwise_equal(serial, fnc::sweep(small_grid(), jobs)));
    }
}

TEST_CASE("reference tables: published spot values") {
    const auto t2 = fnc::reference_table(2);
    REQUIRE(t2.size() == 30);
    // row (103, 2): lower tail (4.02e-11, 2.93e-15, 2.10e-7)
    const auto& r = t2[3 * 5 + 1];
    CHECK(r.mean == 103.0);
    CHECK(r.sd == 2.0);
    CHECK(rel_err(r.lsl.expected, 4.02e-11) < 1e-2);
    CHECK(rel_err(r.lsl.lower, 2.93e-15) < 1e-2);
    CHECK(rel_err(r.lsl.upper, 2.10e-7) < 1e-2);

    const auto t5 = fnc::reference_table(5);
    // row (104, 3): upper tail (4.82e-8, 5.17e-10, 3.27e-6)
    const auto& r5 = t5[4 * 5 + 2];
    CHECK(r5.mean == 104.0);
    CHECK(r5.sd == 3.0);
    CHECK(rel_err(r5.usl.expected, 4.82e-8) < 1e-2);
    CHECK(rel_err(r5.usl.lower, 5.17e-10) < 1e-2);
    CHECK(rel_err(r5.usl.upper, 3.27e-6) < 1e-2);

    const auto t3 = fnc::reference_table(3);
    // row (100, 1): zero systematic error, both tails identical
    const auto& r3 = t3[0];
    CHECK(r3.lsl.expected == r3.usl.expected);
    CHECK(r3.lsl.lower == r3.usl.lower);
    CHECK(r3.lsl.upper == r3.usl.upper);
    CHECK(rel_err(r3.lsl.expected, 7.62e-24) < 1e-2);
    CHECK(rel_err(r3.lsl.lower, 1.85e-30) < 1e-2);
    CHECK(rel_err(r3.lsl.upper, 1.05e-17) < 1e-2);

    CHECK_THROWS_AS(fnc::reference_table(7), std::domain_error);
    CHECK_THROWS_AS(fnc::reference_table(1), std::domain_error);
}

TEST_CASE("interval nesting from n=20 to n=40 on matching reference rows") {
    const auto narrow = [](const std::vector<TableRow>& small_n,
                           const std::vector<TableRow>& large_n) {
        REQUIRE(small_n.size() == large_n.size());
        for (std::size_t i = 0; i < small_n.size(); ++i) {
            CAPTURE(small_n[i].mean);
            CAPTURE(small_n[i].sd);
            CHECK(large_n[i].lsl.lower >= small_n[i].lsl.lower);
            CHECK(large_n[i].lsl.upper <= small_n[i].lsl.upper);
            CHECK(large_n[i].usl.lower >= small_n[i].usl.lower);
            CHECK(large_n[i].usl.upper <= small_n[i].usl.upper);
        }
    };
    narrow(fnc::reference_table(2), fnc::reference_table(3));
    narrow(fnc::reference_table(4), fnc::reference_table(5));
}

TEST_CASE("expected-fraction surfaces are monotone in the mean") {
    const auto t2 = fnc::reference_table(2);
    for (int sd_idx = 0; sd_idx < 5; ++sd_idx) {
        for (int m = 0; m + 1 < 6; ++m) {
            const auto& a = t2[static_cast<std::size_t>(m * 5 + sd_idx)];
            const auto& b = t2[static_cast<std::size_t>((m + 1) * 5 + sd_idx)];
            CHECK(b.lsl.expected <= a.lsl.expected);
            CHECK(b.usl.expected >= a.usl.expected);
        }
    }
}

TEST_CASE("surface export: header, row count, print-parse fixed point") {
    const auto rows = fnc::sweep_serial(small_grid());
    std::ostringstream os;
    fnc::export_surface(rows, fnc::Tail::lower_limit, os);
    const std::string text = os.str();
    CHECK(text.rfind("mean,sd,expected,lower,upper,underflow\n", 0) == 0);
    const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(lines == rows.size() + 1);

    std::ostringstream single;
    fnc::export_surface({rows[0]}, fnc::Tail::upper_limit, single);
    CHECK(std::count(single.str().begin(), single.str().end(), '\n') == 2);

    CHECK_THROWS_AS(fnc::export_surface({}, fnc::Tail::lower_limit, os), std::domain_error);
}

TEST_CASE("table export round-trips through the parser") {
    const auto rows = fnc::sweep_serial(small_grid());
    std::ostringstream os1;
    fnc::export_table(rows, os1);
    std::istringstream is(os1.str());
    const auto parsed = fnc::load_table_csv(is);
    REQUIRE(parsed.size() == rows.size());
    std::ostringstream os2;
    fnc::export_table(parsed, os2);
    CHECK(os1.str() == os2.str());
}

TEST_CASE("loader accepts tab-separated rows with comma decimals") {
    std::istringstream is(
        "mean\tsd\tlsl_expected\tlsl_lower\tlsl_upper\tusl_expected\tusl_lower\tusl_upper\n"
        "100.00\t1.00\t7,62E-24\t2,14E-33\t2,85E-15\t7,62E-24\t2,14E-33\t2,85E-15\n");
    const auto rows = fnc::load_table_csv(is);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean == 100.0);
    CHECK(rel_err(rows[0].lsl.expected, 7.62e-24) < 1e-12);
    CHECK(rel_err(rows[0].usl.upper, 2.85e-15) < 1e-12);
}

TEST_CASE("bundled golden files load and match the computed tables") {
    for (int which : {2, 3, 4, 5}) {
        CAPTURE(which);
        std::ifstream in(std::string(FNC_GOLDEN_DIR) + "/table" + std::to_string(which) + ".csv");
        REQUIRE(in.good());
        const auto golden = fnc::load_table_csv(in);
        REQUIRE(golden.size() == 30);
        const auto diff = fnc::diff_tables(fnc::reference_table(which), golden);
        CHECK(diff.cells_compared == 180);
        // tables 4 and 5 contain ledgered source-data deviations in their
        // most extreme cells; every other cell reproduces within 1e-2
        const int max_known_failures = which == 4 ? 5 : which == 5 ? 2 : 0;
        CHECK(diff.cells_failed <= max_known_failures);
    }
}

TEST_CASE("diff_tables flags perturbed cells and missing rows") {
    const auto rows = fnc::sweep_serial(small_grid());
    auto copy = rows;
    CHECK(fnc::diff_tables(rows, copy).cells_failed == 0);
    copy[2].usl.upper *= 1.5;
    const auto diff = fnc::diff_tables(rows, copy);
    CHECK(diff.cells_failed == 1);
    REQUIRE(diff.failures.size() == 1);
    CHECK(diff.failures[0].cell == "usl_upper");

    auto missing = rows;
    missing.pop_back();
    CHECK(fnc::diff_tables(missing, rows).cells_failed == 6);
}

TEST_CASE("underflowed cells export as 0.000000e0 with the flag column set") {
    GridSpec g;
    g.mean_start = g.mean_stop = 106.0;
    g.mean_step = 1.0;
    g.sd_start = g.sd_stop = 0.1;
    g.sd_step = 1.0;
    g.n = 40;
    g.true_value = 100.0;
    g.e_max = 0.20;
    g.gamma = 0.95;
    const auto rows = fnc::sweep_serial(g);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].ok);
    CHECK(rows[0].lsl.lower_underflow);
    std::ostringstream os;
    fnc::export_surface(rows, fnc::Tail::lower_limit, os);
    CHECK(os.str().find("0.000000e0,") != std::string::npos);
    CHECK(os.str().find(",1\n") != std::string::npos);
}
