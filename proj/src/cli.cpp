#include "stsq/cli.hpp"

#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "stsq/analytic.hpp"
#include "stsq/errors.hpp"
#include "stsq/report.hpp"
#include "stsq/sweep.hpp"
#include "stsq/verify.hpp"

namespace stsq {

namespace {

Axis axis_from_name(const std::string& name) {
    if (name == "s1") return Axis::coordinate(1);
    if (name == "s2") return Axis::coordinate(2);
    if (name == "s3") return Axis::coordinate(3);
    throw InvalidInput("axis must be one of s1|s2|s3");
}

void require_deterministic(const RunConfig& c) {
    if (!c.deterministic) throw InvalidInput("only deterministic runs are provided");
}

void emit(const RunConfig& c, const std::string& content) {
    if (c.out_path.empty())
        std::cout << content;
    else
        write_text_file(c.out_path, content);
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

std::string bool_cell(bool b) { return b ? "1" : "0"; }

Json beam_input_json(const RunConfig& c) {
    Json j;
    j["intensity_x"] = c.intensity_x;
    j["intensity_y"] = c.intensity_y;
    j["phase_x"] = c.phase_x;
    j["phase_y"] = c.phase_y;
    return j;
}

Json oracle_json(const OracleResult& o, const StokesMoments& engine) {
    const auto pack = [](const StokesMoments& m) {
        return std::array<double, 11>{m.mean0,      m.mean0_sq,  m.mean[0],   m.mean[1],
                                      m.mean[2],    m.cov(0, 0), m.cov(1, 1), m.cov(2, 2),
                                      m.cov(0, 1),  m.cov(0, 2), m.cov(1, 2)};
    };
    const auto ev = pack(engine);
    const auto ov = pack(o.moments);
    double max_dev = 0.0;
    for (int q = 0; q < 11; ++q) {
        const double d =
            std::fabs(ev[q] - ov[q]) / std::max({1.0, std::fabs(ev[q]), std::fabs(ov[q])});
        max_dev = std::max(max_dev, d);
    }
    Json j;
    j["moments"] = moments_to_json(o.moments);
    j["checks"] = {{"commutator", o.checks.commutator}, {"casimir", o.checks.casimir}};
    j["convergence"] = {{"dim_low", o.convergence.dim_low},
                        {"dim_high", o.convergence.dim_high},
                        {"drift", o.convergence.drift},
                        {"passed", o.convergence.passed}};
    j["max_deviation_vs_kernel"] = max_dev;
    return j;
}

int cmd_analyze(const RunConfig& c) {
    require_deterministic(c);
    const InputBeam beam =
        InputBeam::from_intensities(c.intensity_x, c.intensity_y, c.phase_x, c.phase_y);
    validate_interaction(c.kt);
    const StokesMoments m = stokes_moments(beam, c.kt);

    Axis axis = Axis::e2();
    std::optional<AxisScanRow> scan;
    if (c.axis == "free") {
        scan = scan_axes(beam, {c.kt}, c.lattice_points).front();
        axis = scan->best_axis;
    } else {
        axis = axis_from_name(c.axis);
    }
    const SqueezingReport rep = squeezing_factor_axis(m, axis);

    if (c.format == "json") {
        Json j = make_envelope("analyze");
        Json input = beam_input_json(c);
        input["kt"] = c.kt;
        input["axis"] = c.axis;
        j["input"] = input;
        j["moments"] = moments_to_json(m);
        j["squeezing"] = squeezing_report_to_json(rep);
        if (scan) {
            j["free_axis_scan"] = {{"best_axis", axis_to_json(scan->best_axis)},
                                   {"best_factor", scan->best_factor},
                                   {"best_coord", scan->best_coord},
                                   {"best_coord_factor", scan->best_coord_factor}};
        }
        if (c.oracle) {
            const OracleResult o = oracle_stokes_moments(beam, c.kt, c.policy);
            j["oracle"] = oracle_json(o, m);
        }
        emit(c, dump_json(j));
    } else {
        CsvWriter csv({"intensity_x", "intensity_y", "phase_x", "phase_y", "kt", "mean_s0",
                       "mean_s1", "mean_s2", "mean_s3", "var_s1", "var_s2", "var_s3", "axis_nx",
                       "axis_ny", "axis_nz", "variance", "denominator", "factor", "degree",
                       "squeezed"});
        csv.add_row({format_number(c.intensity_x), format_number(c.intensity_y),
                     format_number(c.phase_x), format_number(c.phase_y), format_number(c.kt),
                     format_number(m.mean0), format_number(m.mean[0]), format_number(m.mean[1]),
                     format_number(m.mean[2]), format_number(m.v1()), format_number(m.v2()),
                     format_number(m.v3()), format_number(rep.axis.n().x()),
                     format_number(rep.axis.n().y()), format_number(rep.axis.n().z()),
                     format_number(rep.variance), format_number(rep.denominator),
                     format_number(rep.factor), format_number(rep.degree),
                     bool_cell(rep.squeezed())});
        emit(c, csv.str());
    }
    return 0;
}

int cmd_window(const RunConfig& c) {
    require_deterministic(c);
    const InputBeam beam =
        InputBeam::from_intensities(c.intensity_x, c.intensity_y, c.phase_x, c.phase_y);
    const SqueezingWindow w = window_summary(beam);
    const MinimumResult minimum = s2_min(beam);

    if (c.format == "json") {
        Json j = make_envelope("window");
        j["input"] = beam_input_json(c);
        j["window"] = window_to_json(w);
        j["minimum"] = minimum_to_json(minimum);
        j["flags"] = {{"squeezable", w.squeezable}, {"squeezed_condition", minimum.squeezed}};
        emit(c, dump_json(j));
    } else {
        CsvWriter csv({"intensity_x", "intensity_y", "case", "squeezable", "squeezed",
                       "kt_cross_1", "kt_cross_2", "kt_window_open", "kt_window_close", "kt_min",
                       "s2_min"});
        csv.add_row({format_number(c.intensity_x), format_number(c.intensity_y),
                     window_case_name(w.case_label), bool_cell(w.squeezable),
                     bool_cell(minimum.squeezed), opt_cell(w.t01), opt_cell(w.t02), opt_cell(w.t1),
                     opt_cell(w.t2), opt_cell(minimum.kt_min), format_number(minimum.s2_min)});
        emit(c, csv.str());
    }
    return 0;
}

// Squeezing factor along S2 with singular denominators reported as absent.
std::optional<double> guarded_factor(const StokesMoments& m) {
    try {
        return squeezing_factor_axis(m, Axis::e2()).factor;
    } catch (const Error&) {
        return std::nullopt;
    }
}

int cmd_figure(const RunConfig& c) {
    require_deterministic(c);
    if (c.steps < 2) throw InvalidInput("figure ranges need at least 2 steps");
    const double quarter = kPi / 4.0;

    Json j = make_envelope("figure");
    j["figure"] = c.which_figure;

    if (c.which_figure == 1) {
        const InputBeam beam =
            InputBeam::from_intensities(c.intensity_x, c.intensity_y, quarter, quarter);
        CsvWriter csv({"kt", "s2_factor", "x_mean"});
        Json rows = Json::array();
        for (int i = 0; i < c.steps; ++i) {
            const double kt = c.kt_max * double(i) / double(c.steps - 1);
            const StokesMoments m = stokes_moments(beam, kt);
            const std::optional<double> factor = guarded_factor(m);
            csv.add_row({format_number(kt), opt_cell(factor), format_number(m.mean[0])});
            rows.push_back({kt, factor ? Json(*factor) : Json(nullptr), m.mean[0]});
        }
        if (c.format == "json") {
            j["input"] = {{"intensity_x", c.intensity_x}, {"intensity_y", c.intensity_y}};
            j["columns"] = {"kt", "s2_factor", "x_mean"};
            j["rows"] = rows;
            emit(c, dump_json(j));
        } else {
            emit(c, csv.str());
        }
    } else if (c.which_figure == 2) {
        const InputBeam cases[3] = {InputBeam::from_intensities(10.0, 8.0, quarter, quarter),
                                    InputBeam::from_intensities(9.0, 9.0, quarter, quarter),
                                    InputBeam::from_intensities(8.0, 10.0, quarter, quarter)};
        CsvWriter csv({"kt", "degree_x_dominant", "degree_equal", "degree_y_dominant"});
        Json rows = Json::array();
        for (int i = 0; i < c.steps; ++i) {
            const double kt = c.kt_max * double(i) / double(c.steps - 1);
            std::vector<std::string> cells{format_number(kt)};
            Json row = Json::array({kt});
            for (const InputBeam& beam : cases) {
                const std::optional<double> factor = guarded_factor(stokes_moments(beam, kt));
                const std::optional<double> degree =
                    factor ? std::optional<double>(1.0 - *factor) : std::nullopt;
                cells.push_back(opt_cell(degree));
                row.push_back(degree ? Json(*degree) : Json(nullptr));
            }
            csv.add_row(cells);
            rows.push_back(row);
        }
        if (c.format == "json") {
            j["cases"] = {{"x_dominant", {10.0, 8.0}},
                          {"equal", {9.0, 9.0}},
                          {"y_dominant", {8.0, 10.0}}};
            j["columns"] = {"kt", "degree_x_dominant", "degree_equal", "degree_y_dominant"};
            j["rows"] = rows;
            emit(c, dump_json(j));
        } else {
            emit(c, csv.str());
        }
    } else {
        const RegionMap map =
            region_map({0.0, c.ix_max}, {0.0, c.iy_max}, c.resolution);
        if (c.format == "json") {
            j["ix_centers"] = map.ix_centers;
            j["iy_centers"] = map.iy_centers;
            Json values = Json::array();
            for (int bi = 0; bi < map.values.rows(); ++bi) {
                Json row = Json::array();
                for (int ai = 0; ai < map.values.cols(); ++ai) row.push_back(map.values(bi, ai));
                values.push_back(row);
            }
            j["values_by_iy_row"] = values;
            emit(c, dump_json(j));
        } else {
            CsvWriter csv({"intensity_x", "intensity_y", "s2_min"});
            for (int bi = 0; bi < map.values.rows(); ++bi)
                for (int ai = 0; ai < map.values.cols(); ++ai)
                    csv.add_numeric_row(
                        {map.ix_centers[ai], map.iy_centers[bi], map.values(bi, ai)});
            emit(c, csv.str());
        }
    }
    return 0;
}

int cmd_sweep(const RunConfig& c) {
    require_deterministic(c);
    const Axis axis = axis_from_name(c.axis);
    SweepGrid grid;
    grid.phi_x_points = c.phi_x_points;
    grid.phi_y_points = c.phi_y_points;
    grid.kt_points = c.kt_points;
    grid.kt_max = c.sweep_kt_max;
    grid.refine_iters = c.refine_iters;
    const MinimaReport rep = minimize_phase_time(c.intensity_x, c.intensity_y, axis, grid);

    auto same = [](const MinimumPoint& a, const MinimumPoint& b) {
        return a.phi_x == b.phi_x && a.phi_y == b.phi_y && a.kt == b.kt;
    };
    if (c.format == "json") {
        Json j = make_envelope("sweep");
        j["input"] = {{"intensity_x", c.intensity_x},
                      {"intensity_y", c.intensity_y},
                      {"axis", c.axis}};
        Json minima = Json::array();
        for (const MinimumPoint& p : rep.minima) {
            minima.push_back({{"phi_x", p.phi_x},
                              {"phi_y", p.phi_y},
                              {"kt", p.kt},
                              {"axis", axis_to_json(p.axis)},
                              {"factor", p.factor},
                              {"is_global", same(p, rep.global)}});
        }
        j["minima"] = minima;
        j["global"] = {{"phi_x", rep.global.phi_x},
                       {"phi_y", rep.global.phi_y},
                       {"kt", rep.global.kt},
                       {"factor", rep.global.factor}};
        emit(c, dump_json(j));
    } else {
        CsvWriter csv({"phi_x", "phi_y", "kt", "factor", "is_global"});
        for (const MinimumPoint& p : rep.minima) {
            csv.add_row({format_number(p.phi_x), format_number(p.phi_y), format_number(p.kt),
                         format_number(p.factor), bool_cell(same(p, rep.global))});
        }
        emit(c, csv.str());
    }
    return 0;
}

int cmd_verify(const RunConfig& c) {
    require_deterministic(c);
    const VerificationReport r = run_verification(c.policy, c.tolerance);
    if (c.format == "json") {
        Json j = make_envelope("verify");
        j["report"] = verification_to_json(r);
        emit(c, dump_json(j));
    } else {
        emit(c, r.text);
    }
    return r.passed ? 0 : 1;
}

void add_output_options(CLI::App* cmd, RunConfig& c, const std::string& default_format,
                        const std::vector<std::string>& allowed) {
    cmd->add_option("--format", c.format, "output format (default: " + default_format + ")")
        ->check(CLI::IsMember(allowed));
    cmd->add_option("--out", c.out_path, "output file path (default: stdout)");
    cmd->add_option("--deterministic", c.deterministic,
                    "must remain true; the tool has no randomized mode")
        ->capture_default_str();
}

void add_beam_options(CLI::App* cmd, RunConfig& c, bool phases) {
    cmd->add_option("--ix", c.intensity_x, "x-mode intensity |alpha|^2")
        ->required()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--iy", c.intensity_y, "y-mode intensity |beta|^2")
        ->required()
        ->check(CLI::NonNegativeNumber);
    if (phases) {
        cmd->add_option("--phx", c.phase_x, "x-mode phase (radians)")->capture_default_str();
        cmd->add_option("--phy", c.phase_y, "y-mode phase (radians)")->capture_default_str();
    }
}

void add_policy_options(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--max-dim", c.policy.max_dim, "largest Fock dimension tried")
        ->capture_default_str();
    cmd->add_option("--leak-tol", c.policy.leak_tol, "coherent-state norm leakage tolerance")
        ->capture_default_str();
    cmd->add_option("--growth", c.policy.growth_factor, "dimension growth factor")
        ->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    RunConfig c;
    CLI::App app{"polarization-squeezing diagnostics for two-mode light under a pumped x mode"};
    app.require_subcommand(1);

    CLI::App* analyze = app.add_subcommand("analyze", "Stokes moments and squeezing at one kt");
    add_beam_options(analyze, c, true);
    analyze->add_option("--kt", c.kt, "interaction time (dimensionless kt)")
        ->required()
        ->check(CLI::NonNegativeNumber);
    analyze->add_option("--axis", c.axis, "axis: s1|s2|s3|free")
        ->check(CLI::IsMember({"s1", "s2", "s3", "free"}))
        ->capture_default_str();
    analyze->add_option("--lattice", c.lattice_points, "sphere lattice size for --axis free")
        ->capture_default_str();
    analyze->add_flag("--oracle", c.oracle, "also run the Fock oracle and report deviations");
    add_policy_options(analyze, c);
    add_output_options(analyze, c, "json", {"csv", "json"});

    CLI::App* window = app.add_subcommand("window", "crossing/window times and minimum factor");
    add_beam_options(window, c, true);
    add_output_options(window, c, "json", {"csv", "json"});

    CLI::App* figure = app.add_subcommand("figure", "emit the datasets behind the three figures");
    figure->add_option("--which", c.which_figure, "figure number")
        ->required()
        ->check(CLI::Range(1, 3));
    figure->add_option("--ix", c.intensity_x, "x-mode intensity (figure 1)")->default_val(10.0);
    figure->add_option("--iy", c.intensity_y, "y-mode intensity (figure 1)")->default_val(8.0);
    figure->add_option("--kt-max", c.kt_max, "range end for kt columns")->capture_default_str();
    figure->add_option("--steps", c.steps, "number of kt samples")->capture_default_str();
    figure->add_option("--resolution", c.resolution, "region-map resolution (figure 3)")
        ->capture_default_str();
    figure->add_option("--ix-max", c.ix_max, "region-map x-intensity range end (figure 3)")
        ->capture_default_str();
    figure->add_option("--iy-max", c.iy_max, "region-map y-intensity range end (figure 3)")
        ->capture_default_str();
    add_output_options(figure, c, "csv", {"csv", "json"});

    CLI::App* sweep = app.add_subcommand("sweep", "minimize the factor over phases and time");
    add_beam_options(sweep, c, false);
    sweep->add_option("--axis", c.axis, "axis: s1|s2|s3")
        ->check(CLI::IsMember({"s1", "s2", "s3"}))
        ->capture_default_str();
    sweep->add_option("--phx-points", c.phi_x_points, "phase grid points (x)")
        ->capture_default_str();
    sweep->add_option("--phy-points", c.phi_y_points, "phase grid points (y)")
        ->capture_default_str();
    sweep->add_option("--kt-points", c.kt_points, "time grid points")->capture_default_str();
    sweep->add_option("--kt-max", c.sweep_kt_max, "time grid range end")->capture_default_str();
    sweep->add_option("--refine-iters", c.refine_iters, "local refinement iterations")
        ->capture_default_str();
    add_output_options(sweep, c, "json", {"csv", "json"});

    CLI::App* verify = app.add_subcommand("verify", "kernel-vs-oracle grid + arbitration ledger");
    verify->add_option("--tolerance", c.tolerance, "kernel-vs-oracle deviation limit")
        ->capture_default_str();
    add_policy_options(verify, c);
    add_output_options(verify, c, "text", {"text", "json"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c.format.empty()) c.format = app.got_subcommand(figure)   ? "csv"
                                         : app.got_subcommand(verify) ? "text"
                                                                      : "json";
        if (app.got_subcommand(analyze)) return cmd_analyze(c);
        if (app.got_subcommand(window)) return cmd_window(c);
        if (app.got_subcommand(figure)) return cmd_figure(c);
        if (app.got_subcommand(sweep)) return cmd_sweep(c);
        if (app.got_subcommand(verify)) return cmd_verify(c);
        return 2;
    } catch (const InvalidInput& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Unsupported& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const DegenerateAxis& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const NoValidPoint& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const SingularBoundary& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

}  // namespace stsq
