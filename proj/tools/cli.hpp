#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oamturb/oamturb.hpp"

namespace oamturb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Turbulence given either directly (--r0) or through the path (--cn2, --wavelength, --distance).
struct TurbulenceFlags {
    std::optional<double> r0;
    std::optional<double> cn2;
    std::optional<double> wavelength;
    std::optional<double> distance;

    void add_to(CLI::App& app, bool with_distance = true) {
        auto* r0_opt = app.add_option("--r0", r0, "Fried parameter r0 [m]");
        auto* cn2_opt = app.add_option("--cn2", cn2, "refractive-index structure constant Cn^2 [m^-2/3]");
        auto* wl_opt = app.add_option("--wavelength", wavelength, "optical wavelength [m]; k = 2 pi / wavelength");
        r0_opt->excludes(cn2_opt);
        r0_opt->excludes(wl_opt);
        if (with_distance) {
            auto* d_opt = app.add_option("--distance", distance, "propagation distance L [m]");
            r0_opt->excludes(d_opt);
        }
    }

    TurbulenceModel model() const {
        if (r0) {
            return TurbulenceModel(*r0);
        }
        if (!cn2 || !wavelength || !distance) {
            throw UsageError("give either --r0 or all of --cn2, --wavelength, --distance");
        }
        return TurbulenceModel::from_path(*cn2, wavenumber(), *distance);
    }

    double wavenumber() const {
        if (!wavelength) {
            throw UsageError("--wavelength is required");
        }
        if (!(*wavelength > 0.0)) {
            throw UsageError("--wavelength must be positive");
        }
        return 2.0 * std::numbers::pi / *wavelength;
    }
};

struct QuadratureFlags {
    QuadratureSpec spec;

    void add_to(CLI::App& app) {
        app.add_option("--radial-nodes", spec.radial_nodes, "starting Gauss-Legendre order (>= 32)")
            ->capture_default_str();
        app.add_option("--angular-samples", spec.angular_samples, "angular sample baseline (power of two >= 256)")
            ->capture_default_str();
        app.add_option("--tol", spec.target_rel_err, "target relative error")->capture_default_str();
    }
};

/// "lo:hi:step" or "lo:hi".
inline std::vector<double> parse_range(const std::string& text, bool with_step) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            parts.push_back(parse_double(item));
        } catch (const ConfigError&) {
            throw UsageError("bad range '" + text + "'");
        }
    }
    if (parts.size() != (with_step ? 3u : 2u)) {
        throw UsageError("range '" + text + "' must be " + (with_step ? "lo:hi:step" : "lo:hi"));
    }
    return parts;
}

// Options that do not influence results stay out of the embedded config.
inline bool is_execution_option(const std::string& name) {
    return name == "workers" || name == "out" || name == "config" || name == "help" || name == "format";
}

/// Subcommand options and their effective values, in declaration order.
inline std::vector<std::pair<std::string, std::string>> effective_config(const CLI::App& sub) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty()) {
            continue;
        }
        const std::string name = opt->get_lnames().front();
        if (is_execution_option(name)) {
            continue;
        }
        std::string value;
        if (opt->count() > 0) {
            const auto& results = opt->results();
            for (std::size_t i = 0; i < results.size(); ++i) {
                value += (i ? "," : "") + results[i];
            }
        } else {
            value = opt->get_default_str();
        }
        if (!value.empty()) {
            out.emplace_back(name, value);
        }
    }
    return out;
}

inline std::string config_line(const std::string& command, const CLI::App& sub) {
    std::string line = "oamturb " + std::string(kVersion) + " " + command;
    for (const auto& [k, v] : effective_config(sub)) {
        line += " --" + k + "=" + v;
    }
    return line;
}

inline nlohmann::ordered_json config_json(const std::string& command, const CLI::App& sub) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["command"] = command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : effective_config(sub)) {
        cfg[k] = v;
    }
    j["config"] = cfg;
    return j;
}

/// Writes to the --out file when given, otherwise to the command's stdout stream.
inline void emit(const std::string& path, std::ostream& stdout_stream, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(stdout_stream);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw UsageError("cannot open output file " + path);
    }
    body(file);
    if (!file) {
        throw NumericError("failed writing " + path, 0.0);
    }
}

inline void dump_json(std::ostream& out, const nlohmann::ordered_json& j) { out << j.dump(2) << '\n'; }

inline nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return format_double(v);
}

/// Runs the command line; returns the process exit code (0 ok, 2 usage, 3 numeric).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Entanglement decay of OAM qubits in weak Kolmogorov turbulence. Units: meters, radians; "
                 "Cn^2 in m^-2/3."};
    app.name("oamturb");
    app.set_config("--config", "", "INI-style key = value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string out_path;
    int workers = 1;
    std::function<void()> action;

    // map
    auto* map_cmd = app.add_subcommand("map", "survival/crosstalk amplitudes and concurrence for one setting");
    int map_l0 = 0;
    double map_w0 = 0.0;
    std::string map_format = "text";
    TurbulenceFlags map_turb;
    QuadratureFlags map_quad;
    map_cmd->add_option("--l0", map_l0, "azimuthal index of the qubit modes (+-l0)")->required();
    map_cmd->add_option("--w0", map_w0, "beam waist [m]")->required();
    map_turb.add_to(*map_cmd);
    map_quad.add_to(*map_cmd);
    map_cmd->add_option("--format", map_format, "text or json")->check(CLI::IsMember({"text", "json"}));
    map_cmd->add_option("--out", out_path, "output file (default stdout)");
    map_cmd->callback([&] {
        action = [&] {
            const auto model = map_turb.model();
            const auto amps = channel_amplitudes(map_l0, map_w0, model, map_quad.spec);
            const double ratio = amplitude_ratio(amps);
            const double conc = output_concurrence(amps);
            emit(out_path, out, [&](std::ostream& os) {
                if (map_format == "json") {
                    auto j = config_json("map", *map_cmd);
                    j["r0"] = model.r0();
                    j["a"] = amps.a;
                    j["a_err"] = amps.a_err;
                    j["b"] = amps.b;
                    j["b_err"] = amps.b_err;
                    j["atilde"] = ratio;
                    j["concurrence"] = conc;
                    dump_json(os, j);
                } else {
                    os << "# " << config_line("map", *map_cmd) << '\n';
                    os << "r0 = " << format_double(model.r0()) << '\n';
                    os << "a = " << format_double(amps.a) << " +- " << format_double(amps.a_err) << '\n';
                    os << "b = " << format_double(amps.b) << " +- " << format_double(amps.b_err) << '\n';
                    os << "atilde = " << format_double(ratio) << '\n';
                    os << "concurrence = " << format_double(conc) << '\n';
                }
            });
        };
    });

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "concurrence vs x = xi(l0)/r0, CSV");
    std::vector<int> sweep_l0;
    double sweep_w0 = 0.0;
    std::string sweep_x = "0.02:1.5:0.01";
    QuadratureFlags sweep_quad;
    sweep_cmd->add_option("--l0", sweep_l0, "comma-separated l0 values")->required()->delimiter(',');
    sweep_cmd->add_option("--w0", sweep_w0, "beam waist [m]")->required();
    sweep_cmd->add_option("--x", sweep_x, "x grid lo:hi:step")->capture_default_str();
    sweep_quad.add_to(*sweep_cmd);
    sweep_cmd->add_option("--out", out_path, "output CSV (default stdout)");
    sweep_cmd->add_option("--workers", workers, "worker threads")->capture_default_str();
    sweep_cmd->callback([&] {
        action = [&] {
            const auto r = parse_range(sweep_x, true);
            const auto xs = linear_grid(r[0], r[1], r[2]);
            std::vector<CollapseRecord> rows;
            for (int l0 : sweep_l0) {
                if (l0 == 0) {
                    throw UsageError("--l0 values must be nonzero");
                }
                auto curve = concurrence_curve(l0, sweep_w0, xs, sweep_quad.spec, workers);
                rows.insert(rows.end(), curve.begin(), curve.end());
            }
            emit(out_path, out, [&](std::ostream& os) {
                write_collapse_csv(os, rows, {config_line("sweep", *sweep_cmd)});
            });
        };
    });

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit exp(-alpha x^beta) to one sweep curve, JSON");
    std::string fit_in;
    int fit_l0 = 0;
    std::string fit_window = "0.2:0.95";
    fit_cmd->add_option("--in", fit_in, "sweep CSV")->required();
    fit_cmd->add_option("--l0", fit_l0, "curve to fit")->required();
    fit_cmd->add_option("--window", fit_window, "x window lo:hi")->capture_default_str();
    fit_cmd->add_option("--out", out_path, "output JSON (default stdout)");
    fit_cmd->callback([&] {
        action = [&] {
            std::ifstream in(fit_in);
            if (!in) {
                throw UsageError("cannot read " + fit_in);
            }
            const auto rows = read_collapse_csv(in);
            std::vector<CollapseRecord> curve;
            std::copy_if(rows.begin(), rows.end(), std::back_inserter(curve),
                         [&](const CollapseRecord& r) { return r.l0 == fit_l0; });
            if (curve.empty()) {
                throw UsageError("no rows with l0 = " + std::to_string(fit_l0) + " in " + fit_in);
            }
            const auto w = parse_range(fit_window, false);
            const auto fit = fit_stretched_exponential(curve, w[0], w[1]);
            emit(out_path, out, [&](std::ostream& os) {
                auto j = config_json("fit", *fit_cmd);
                j["alpha"] = fit.alpha;
                j["beta"] = fit.beta;
                j["residual"] = fit.residual;
                j["points"] = fit.points;
                j["x_lo"] = fit.x_lo;
                j["x_hi"] = fit.x_hi;
                j["iterations"] = fit.iterations;
                dump_json(os, j);
            });
        };
    });

    // critical
    auto* crit_cmd = app.add_subcommand("critical", "smallest x = xi/r0 with zero concurrence, JSON");
    int crit_l0 = 0;
    double crit_w0 = 1.0;
    double crit_tol = 1e-4;
    QuadratureFlags crit_quad;
    crit_cmd->add_option("--l0", crit_l0, "azimuthal index")->required();
    crit_cmd->add_option("--w0", crit_w0, "beam waist [m]")->capture_default_str();
    crit_cmd->add_option("--bracket-tol", crit_tol, "bisection bracket width")->capture_default_str();
    crit_quad.add_to(*crit_cmd);
    crit_cmd->add_option("--out", out_path, "output JSON (default stdout)");
    crit_cmd->callback([&] {
        action = [&] {
            const double xc = critical_x(crit_l0, crit_w0, crit_quad.spec, crit_tol);
            const double xi = phase_correlation_length(LGMode(crit_l0, crit_w0));
            const double ratio = amplitude_ratio(crit_l0, crit_w0, TurbulenceModel(xi / xc), crit_quad.spec);
            emit(out_path, out, [&](std::ostream& os) {
                auto j = config_json("critical", *crit_cmd);
                j["critical_x"] = xc;
                j["r0"] = xi / xc;
                j["atilde"] = ratio;
                dump_json(os, j);
            });
        };
    });

    // scaling
    auto* scale_cmd = app.add_subcommand("scaling", "power law of the entanglement distance in l0, JSON");
    std::vector<int> scale_l0{16, 32, 64, 128, 256, 512};
    double scale_w0 = 0.0;
    double scale_threshold = 0.01;
    TurbulenceFlags scale_turb;
    QuadratureFlags scale_quad;
    scale_cmd->add_option("--l0", scale_l0, "comma-separated l0 values")->delimiter(',')->capture_default_str();
    scale_cmd->add_option("--w0", scale_w0, "beam waist [m]")->required();
    scale_cmd->add_option("--cn2", scale_turb.cn2, "Cn^2 [m^-2/3]")->required();
    scale_cmd->add_option("--wavelength", scale_turb.wavelength, "wavelength [m]")->required();
    scale_cmd->add_option("--threshold", scale_threshold, "concurrence defining the distance")->capture_default_str();
    scale_quad.add_to(*scale_cmd);
    scale_cmd->add_option("--out", out_path, "output JSON (default stdout)");
    scale_cmd->add_option("--workers", workers, "worker threads")->capture_default_str();
    scale_cmd->callback([&] {
        action = [&] {
            const auto res = distance_scaling(scale_l0, *scale_turb.cn2, scale_turb.wavenumber(), scale_w0,
                                              scale_threshold, scale_quad.spec, workers);
            emit(out_path, out, [&](std::ostream& os) {
                auto j = config_json("scaling", *scale_cmd);
                j["slope"] = res.slope;
                j["intercept"] = res.intercept;
                j["analytic_slope"] = res.analytic_slope;
                auto pts = nlohmann::ordered_json::array();
                for (const auto& p : res.points) {
                    pts.push_back({{"l0", p.l0}, {"x", p.x}, {"r0", p.r0}, {"distance", p.distance}});
                }
                j["points"] = pts;
                dump_json(os, j);
            });
        };
    });

    // mc
    auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo phase-screen estimate of a and b, JSON");
    int mc_l0 = 0;
    double mc_w0 = 0.0;
    int mc_samples = 1000;
    std::uint64_t mc_seed = 1;
    std::optional<int> mc_grid;
    std::optional<double> mc_extent;
    int mc_radial = 48;
    TurbulenceFlags mc_turb;
    mc_cmd->add_option("--l0", mc_l0, "azimuthal index")->required();
    mc_cmd->add_option("--w0", mc_w0, "beam waist [m]")->required();
    mc_turb.add_to(*mc_cmd);
    mc_cmd->add_option("--samples", mc_samples, "screens in the ensemble (>= 100)")->capture_default_str();
    mc_cmd->add_option("--seed", mc_seed, "ensemble seed")->capture_default_str();
    mc_cmd->add_option("--grid", mc_grid, "screen samples per side (power of two >= 256)");
    mc_cmd->add_option("--extent", mc_extent, "screen side length [m]");
    mc_cmd->add_option("--radial-nodes", mc_radial, "rings per screen")->capture_default_str();
    mc_cmd->add_option("--out", out_path, "output JSON (default stdout)");
    mc_cmd->add_option("--workers", workers, "worker threads")->capture_default_str();
    mc_cmd->callback([&] {
        action = [&] {
            const auto model = mc_turb.model();
            McOptions opts;
            opts.workers = workers;
            opts.radial_nodes = mc_radial;
            if (mc_grid || mc_extent) {
                ScreenGrid grid = ScreenGrid::for_beam(mc_l0, mc_w0, model.r0());
                if (mc_grid) {
                    grid.n = *mc_grid;
                }
                if (mc_extent) {
                    grid.extent = *mc_extent;
                }
                opts.grid = grid;
            }
            const auto res = mc_amplitudes(mc_l0, mc_w0, model, mc_samples, mc_seed, opts);
            emit(out_path, out, [&](std::ostream& os) {
                auto j = config_json("mc", *mc_cmd);
                j["r0"] = model.r0();
                j["a_mc"] = res.a;
                j["sigma_a"] = res.sigma_a;
                j["b_mc"] = res.b;
                j["sigma_b"] = res.sigma_b;
                j["samples"] = res.samples;
                j["grid_n"] = res.grid.n;
                j["grid_extent"] = res.grid.extent;
                j["budget_exceeded"] = res.budget_exceeded;
                dump_json(os, j);
            });
        };
    });

    // screen
    auto* screen_cmd = app.add_subcommand(
        "screen",
        "export one phase screen. Binary layout (little-endian): 8-byte magic 'OAMSCRN1', uint64 n, "
        "float64 extent [m], uint64 seed, then n*n float64 phases [rad], row-major (row = y index). "
        "CSV: '#' header lines, then n rows of n comma-separated phases");
    int screen_n = 256;
    double screen_extent = 0.0;
    std::uint64_t screen_seed = 1;
    std::string screen_format = "bin";
    TurbulenceFlags screen_turb;
    screen_cmd->add_option("--n", screen_n, "samples per side")->capture_default_str();
    screen_cmd->add_option("--extent", screen_extent, "side length [m]")->required();
    screen_turb.add_to(*screen_cmd);
    screen_cmd->add_option("--seed", screen_seed, "screen seed")->capture_default_str();
    screen_cmd->add_option("--format", screen_format, "bin or csv")->check(CLI::IsMember({"bin", "csv"}));
    screen_cmd->add_option("--out", out_path, "output file (required for bin)");
    screen_cmd->callback([&] {
        action = [&] {
            if (screen_format == "bin" && (out_path.empty() || out_path == "-")) {
                throw UsageError("--out is required for binary screens");
            }
            const auto model = screen_turb.model();
            const auto screen = sample_screen(ScreenGrid{screen_n, screen_extent}, model, screen_seed);
            emit(out_path, out, [&](std::ostream& os) {
                if (screen_format == "bin") {
                    write_screen_binary(screen, os);
                    return;
                }
                os << "# " << config_line("screen", *screen_cmd) << '\n';
                os << "# n=" << screen.grid.n << " extent=" << format_double(screen.grid.extent)
                   << " seed=" << screen.seed << '\n';
                for (int j = 0; j < screen.grid.n; ++j) {
                    for (int i = 0; i < screen.grid.n; ++i) {
                        os << (i ? "," : "") << format_double(screen.at(i, j));
                    }
                    os << '\n';
                }
            });
        };
    });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (workers < 1) {
            throw UsageError("--workers must be >= 1");
        }
        action();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::move(args), out, err);
}

}  // namespace oamturb::cli
