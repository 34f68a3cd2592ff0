#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scem/contact.hpp"
#include "scem/errors.hpp"
#include "scem/forward.hpp"
#include "scem/inverse.hpp"
#include "scem/io.hpp"
#include "scem/mesh.hpp"
#include "scem/phantom.hpp"
#include "scem/shapederiv.hpp"
#include "scem/study.hpp"

namespace scem {

namespace {

namespace fs = std::filesystem;

struct Global {
    std::string out = "out";
    std::size_t threads = 1;
};

// Conductivity and contacts of one forward configuration.
struct ModelOptions {
    std::string layout = "default8";
    int level = 5;
    int order = 1;
    double sigma = 1.0;
    std::string phantom;   // file; overrides sigma
    std::string model = "hat";
    double zeta = 20.0;    // uniform height; ignored with a profile file
    std::string profile;   // file

    void add_to(CLI::App* app, bool with_level = true) {
        app->add_option("--layout", layout, "default8, default12, default16 or a layout file")->capture_default_str();
        if (with_level) app->add_option("--level", level, "mesh refinement level")->capture_default_str();
        app->add_option("--order", order, "element order")->check(CLI::IsMember({1, 2}))->capture_default_str();
        app->add_option("--sigma", sigma, "constant conductivity")->capture_default_str();
        app->add_option("--phantom", phantom, "phantom file for the conductivity");
        app->add_option("--model", model, "contact model")->check(CLI::IsMember({"box", "hat"}))->capture_default_str();
        app->add_option("--zeta", zeta, "box height or hat half-height on every electrode")->capture_default_str();
        app->add_option("--profile", profile, "contact profile file");
    }

    ElectrodeLayout make_layout() const { return io::load_layout(layout); }

    ConductanceProfile make_contacts(const ElectrodeLayout& lay) const {
        if (!profile.empty()) return io::profile_from_json(io::read_json(profile));
        return make_profile(lay, profile_kind_from_string(model), zeta);
    }

    ConductivityField make_sigma(const Mesh& mesh) const {
        if (!phantom.empty()) return io::phantom_from_json(io::read_json(phantom)).on(mesh);
        return ConductivityField::constant(sigma);
    }
};

// Echoes the global options and those of the selected command as TOML that
// --config reads back.
fs::path prepare(const Global& g, const CLI::App& root) {
    const fs::path dir(g.out);
    fs::create_directories(dir);
    std::string section;
    const CLI::App* leaf = &root;
    for (;;) {
        const auto subs = leaf->get_subcommands();
        if (subs.empty()) break;
        leaf = subs.front();
        section += (section.empty() ? "" : ".") + leaf->get_name();
    }
    std::ofstream cfg(dir / "config.toml");
    cfg << "out=" << std::quoted(g.out) << "\nthreads=" << g.threads << "\n[" << section << "]\n"
        << leaf->config_to_str(true, false);
    return dir;
}

void say(const std::string& line) { std::cerr << line << '\n'; }

std::vector<double> parse_pattern(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ContractError("cannot parse current pattern entry '" + item + "'");
        }
    }
    return v;
}

// ---------------------------------------------------------------- mesh

void cmd_mesh(const Global& g, const CLI::App& root, const ModelOptions& m) {
    const auto dir = prepare(g, root);
    const Mesh mesh = build_mesh(m.level, m.make_layout(), m.order);
    io::write_json(dir / "mesh.json", io::to_json(mesh));
    std::cout << "mesh level " << mesh.level() << ": " << mesh.vertices().size() << " nodes, "
              << mesh.triangles().size() << " triangles, " << mesh.boundary_edges().size() << " boundary edges\n";
}

// ---------------------------------------------------------------- forward

struct ForwardOptions {
    std::string pattern;  // comma separated; default e_M - e_1
    bool nodal = false;
};

void cmd_forward(const Global& g, const CLI::App& root, const ModelOptions& m, const ForwardOptions& f) {
    const auto dir = prepare(g, root);
    const ElectrodeLayout layout = m.make_layout();
    auto mesh = std::make_shared<const Mesh>(build_mesh(m.level, layout, m.order));
    const ConductanceProfile zeta = m.make_contacts(layout);
    const ForwardSolver solver = make_solver(mesh, m.make_sigma(*mesh), zeta);
    std::optional<CurrentPattern> given;
    if (!f.pattern.empty()) {
        const std::vector<double> v = parse_pattern(f.pattern);
        given.emplace(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    const CurrentPattern pattern = given ? *given : CurrentPattern::between(layout.size(), layout.size() - 1, 0);
    if (pattern.size() != layout.size()) throw ContractError("current pattern length does not match the layout");
    const ForwardSolution sol = solver.solve(pattern);
    io::write_json(dir / "solution.json", io::to_json(sol));
    io::write_json(dir / "profile.json", io::to_json(zeta));
    const MeasurementMap R = measurement_map(solver);
    io::write_matrix(dir / "measurement_map.csv", R.R);
    if (f.nodal) {
        std::vector<double> u(sol.u.data(), sol.u.data() + sol.u.size());
        io::write_nodal(dir / "u.csv", mesh->dof_points(), u, "u");
    }
    const double asym = (R.R - R.R.transpose()).cwiseAbs().maxCoeff() / R.R.norm();
    std::cout << "U =";
    for (Eigen::Index k = 0; k < sol.U.size(); ++k) std::cout << ' ' << sol.U[k];
    std::cout << "\nreciprocity: max |R - R^T| / |R| = " << asym << '\n';
}

// ---------------------------------------------------------------- study

struct SweepOptions {
    std::string layout = "default8";
    int level = 10;
    double sigma = 1.0;
    double ratio_min = 1e-4;
    double ratio_max = 10.0;
    std::size_t points = 20;
};

void add_sweep(CLI::App* app, SweepOptions& s, int default_level) {
    s.level = default_level;
    app->add_option("--layout", s.layout)->capture_default_str();
    app->add_option("--level", s.level, "comparison mesh level")->capture_default_str();
    app->add_option("--sigma", s.sigma)->capture_default_str();
    app->add_option("--ratio-min", s.ratio_min, "smallest sigma/zeta")->capture_default_str();
    app->add_option("--ratio-max", s.ratio_max, "largest sigma/zeta")->capture_default_str();
    app->add_option("--points", s.points, "logarithmic grid points")->capture_default_str();
}

void report_failures(const std::vector<SweepFailure>& failures) {
    for (const auto& f : failures) say("ratio " + std::to_string(f.ratio) + " failed: " + f.message);
}

void cmd_difference(const Global& g, const CLI::App& root, const SweepOptions& s) {
    const auto dir = prepare(g, root);
    auto mesh = std::make_shared<const Mesh>(build_mesh(s.level, io::load_layout(s.layout), 1));
    const auto ratios = log_grid(s.ratio_min, s.ratio_max, s.points);
    const DifferenceCurve curve = difference_sweep(mesh, s.sigma, ratios, g.threads);
    io::write_difference_curve(dir / "difference_curve.csv", curve);
    report_failures(curve.failures);
    const auto peak = std::max_element(curve.samples.begin(), curve.samples.end(),
                                       [](const auto& a, const auto& b) { return a.difference < b.difference; });
    if (peak != curve.samples.end()) {
        std::cout << "max d_U = " << peak->difference << " at sigma/zeta = " << peak->ratio << '\n';
    }
}

void cmd_scaling(const Global& g, const CLI::App& root, const SweepOptions& s) {
    const auto dir = prepare(g, root);
    auto mesh = std::make_shared<const Mesh>(build_mesh(s.level, io::load_layout(s.layout), 1));
    const auto ratios = log_grid(s.ratio_min, s.ratio_max, s.points);
    const ScalingCurve curve = scaling_sweep(mesh, s.sigma, ratios, {}, g.threads);
    io::write_scaling_curve(dir / "scaling_curve.csv", curve);
    report_failures(curve.failures);
    const auto peak = std::max_element(curve.samples.begin(), curve.samples.end(), [](const auto& a, const auto& b) {
        return a.result.difference < b.result.difference;
    });
    if (peak != curve.samples.end()) {
        std::cout << "max optimal d_U' = " << peak->result.difference << " at sigma/zeta = " << peak->ratio
                  << " (sigma/zeta' = " << s.sigma / peak->result.zeta_hat << ")\n";
    }
}

struct RateOptions {
    std::string layout = "default8";
    double sigma = 1.0;
    double box_ratio = 0.05;
    double hat_ratio = 0.03;
    std::string setup;  // phantom + contacts file
    std::vector<int> orders{1, 2};
    std::vector<std::string> models{"box", "hat"};
    std::vector<int> p1_levels{3, 4, 5, 6, 7, 8};
    int p1_reference = 10;
    std::vector<int> p2_levels{3, 4, 5, 6, 7};
    int p2_reference = 9;
    std::size_t fit_points = 4;
};

void add_rates(CLI::App* app, RateOptions& r, bool derivatives) {
    app->add_option("--layout", r.layout)->capture_default_str();
    app->add_option("--sigma", r.sigma)->capture_default_str();
    app->add_option("--box-ratio", r.box_ratio, "sigma / box height")->capture_default_str();
    app->add_option("--hat-ratio", r.hat_ratio, "sigma / hat half-height")->capture_default_str();
    app->add_option("--setup", r.setup, "phantom and per-electrode contacts file (overrides the above)");
    if (!derivatives) {
        app->add_option("--orders", r.orders)->delimiter(',')->check(CLI::IsMember({1, 2}))->capture_default_str();
    }
    app->add_option("--models", r.models)->delimiter(',')->check(CLI::IsMember({"box", "hat"}))->capture_default_str();
    app->add_option("--p1-levels", r.p1_levels)->delimiter(',')->capture_default_str();
    app->add_option("--p1-reference", r.p1_reference)->capture_default_str();
    if (!derivatives) {
        app->add_option("--p2-levels", r.p2_levels)->delimiter(',')->capture_default_str();
        app->add_option("--p2-reference", r.p2_reference)->capture_default_str();
    }
    app->add_option("--fit-points", r.fit_points, "finest levels used for the slope")->capture_default_str();
}

struct RateSetup {
    ElectrodeLayout layout;
    std::string label;
    ConductivityProvider sigma;
    std::vector<double> box, hat;
};

RateSetup load_setup(const RateOptions& r) {
    if (r.setup.empty()) {
        const ElectrodeLayout layout = io::load_layout(r.layout);
        std::ostringstream label;
        label << "ratio " << r.box_ratio << '/' << r.hat_ratio;
        return {layout, label.str(), constant_conductivity(r.sigma),
                std::vector<double>(layout.size(), r.sigma / r.box_ratio),
                std::vector<double>(layout.size(), r.sigma / r.hat_ratio)};
    }
    const io::Json j = io::read_json(r.setup);
    try {
        const auto& lay = j.at("layout");
        ElectrodeLayout layout = lay.is_string() ? io::load_layout(lay.get<std::string>()) : io::layout_from_json(lay);
        const Phantom phantom = io::phantom_from_json(j.at("phantom"));
        return {layout, fs::path(r.setup).stem().string(),
                [phantom](const Mesh& mesh) { return phantom.on(mesh); },
                j.at("contacts").at("box").get<std::vector<double>>(),
                j.at("contacts").at("hat").get<std::vector<double>>()};
    } catch (const io::Json::exception& e) {
        throw ContractError("malformed setup file: " + std::string(e.what()));
    }
}

ConvergenceResult run_rates(const Global& g, const RateOptions& r, const std::vector<int>& orders, bool derivatives) {
    const RateSetup setup = load_setup(r);
    ConvergenceResult all;
    for (int order : orders) {
        std::vector<ConvergenceCase> cases;
        for (const auto& model : r.models) {
            const ProfileKind kind = profile_kind_from_string(model);
            cases.push_back({setup.label, model, order,
                             make_profile(setup.layout, kind, kind == ProfileKind::Box ? setup.box : setup.hat),
                             setup.sigma});
        }
        ConvergenceOptions options;
        options.levels = order == 1 ? r.p1_levels : r.p2_levels;
        options.reference_level = order == 1 ? r.p1_reference : r.p2_reference;
        options.derivatives = derivatives;
        options.fit_points = r.fit_points;
        options.threads = g.threads;
        options.progress = [order](std::size_t done, std::size_t total) {
            say("P" + std::to_string(order) + ": case " + std::to_string(done) + "/" + std::to_string(total) +
                " done");
        };
        const ConvergenceResult res = convergence_suite(setup.layout, cases, options);
        all.rates.rows.insert(all.rates.rows.end(), res.rates.rows.begin(), res.rates.rows.end());
        all.rates.fits.insert(all.rates.fits.end(), res.rates.fits.begin(), res.rates.fits.end());
        all.derivatives.rows.insert(all.derivatives.rows.end(), res.derivatives.rows.begin(),
                                    res.derivatives.rows.end());
        all.rates.reference_level = all.derivatives.reference_level = options.reference_level;
    }
    return all;
}

void cmd_rates(const Global& g, const CLI::App& root, const RateOptions& r) {
    const auto dir = prepare(g, root);
    const ConvergenceResult res = run_rates(g, r, r.orders, false);
    io::write_rates(dir / "rates.csv", res.rates);
    for (const auto& f : res.rates.fits) {
        std::cout << "P" << f.order << ' ' << f.model << ": slope " << f.slope << " over levels " << f.first_level
                  << ".." << f.last_level << '\n';
    }
}

void cmd_deriv(const Global& g, const CLI::App& root, const RateOptions& r) {
    const auto dir = prepare(g, root);
    const ConvergenceResult res = run_rates(g, r, {1}, true);
    io::write_deriv_rates(dir / "deriv_rates.csv", res.derivatives);
    io::write_rates(dir / "rates.csv", res.rates);
    for (const auto& row : res.derivatives.rows) {
        std::cout << row.model << " level " << row.level << ": delta = " << row.delta[0] << ' ' << row.delta[1]
                  << ' ' << row.delta[2] << '\n';
    }
}

// ---------------------------------------------------------------- synth / invert

struct SynthOptions {
    std::string phantom;
    std::string layout = "default16";
    std::string model = "box";
    double zeta = 50.0;
    std::string profile;
    int fine_level = 7;
    int order = 1;
    double noise = 2e-3;
    std::uint64_t seed = 0;
};

void cmd_synth(const Global& g, const CLI::App& root, const SynthOptions& s) {
    const auto dir = prepare(g, root);
    SynthesisConfig config;
    config.phantom = io::phantom_from_json(io::read_json(s.phantom));
    config.layout = io::load_layout(s.layout);
    if (!s.profile.empty()) {
        const ConductanceProfile p = io::profile_from_json(io::read_json(s.profile));
        config.kind = p.kind();
        config.contacts.assign(p.heights().begin(), p.heights().end());
        config.layout = p.layout();
    } else {
        config.kind = profile_kind_from_string(s.model);
        config.contacts.assign(config.layout.size(), s.zeta);
    }
    config.fine_level = s.fine_level;
    config.order = s.order;
    config.relative_noise = s.noise;
    config.seed = s.seed;
    const MeasurementFrame frame = synthesize_data(config);
    io::write_json(dir / "frame.json", io::to_json(frame));
    std::cout << "frame: " << frame.pattern_count() << " patterns x " << frame.electrode_count()
              << " electrodes, noise std " << frame.noise_std << '\n';
}

struct InvertOptions {
    std::string data;
    std::string layout = "default16";
    int level = 5;
    std::string model = "box";
    double sigma0 = 0.25;
    double zeta0 = 10.0;
    std::string prior;
    int max_iterations = 60;
};

void add_invert(CLI::App* app, InvertOptions& o) {
    app->add_option("--data", o.data, "measurement frame file")->required();
    app->add_option("--layout", o.layout)->capture_default_str();
    app->add_option("--level", o.level, "reconstruction mesh level")->capture_default_str();
    app->add_option("--model", o.model)->check(CLI::IsMember({"box", "hat"}))->capture_default_str();
    app->add_option("--sigma0", o.sigma0, "initial conductivity")->capture_default_str();
    app->add_option("--zeta0", o.zeta0, "initial contact parameter")->capture_default_str();
    app->add_option("--max-iterations", o.max_iterations)->capture_default_str();
}

io::Json contacts_json(const std::vector<double>& contacts, const std::string& model) {
    return {{"model", model}, {"contacts", contacts}};
}

void cmd_homogeneous(const Global& g, const CLI::App& root, const InvertOptions& o) {
    const auto dir = prepare(g, root);
    const MeasurementFrame frame = io::frame_from_json(io::read_json(o.data));
    ForwardModel model{std::make_shared<const Mesh>(build_mesh(o.level, io::load_layout(o.layout), 1)),
                       profile_kind_from_string(o.model)};
    LMConfig lm;
    lm.max_iterations = o.max_iterations;
    const HomogeneousFit fit = fit_homogeneous(frame, model, o.sigma0, o.zeta0, lm);
    io::Json out = contacts_json(fit.contacts, o.model);
    out["sigma"] = fit.sigma;
    out["relative_discrepancy"] = fit.relative_discrepancy;
    out["converged"] = fit.lm.converged;
    out["stop_reason"] = fit.lm.stop_reason;
    out["iterations"] = fit.lm.iterations;
    io::write_json(dir / "fit.json", out);
    io::write_iterations(dir / "iterations.csv", fit.lm);
    std::cout << "sigma = " << fit.sigma << ", relative discrepancy " << fit.relative_discrepancy << " ("
              << fit.lm.stop_reason << ", " << fit.lm.iterations << " iterations)\n";
    if (!fit.lm.converged) say("warning: the fit did not converge");
}

void cmd_map(const Global& g, const CLI::App& root, const InvertOptions& o) {
    const auto dir = prepare(g, root);
    const MeasurementFrame frame = io::frame_from_json(io::read_json(o.data));
    auto mesh = std::make_shared<const Mesh>(build_mesh(o.level, io::load_layout(o.layout), 1));
    ForwardModel model{mesh, profile_kind_from_string(o.model)};
    const io::PriorSpec spec = o.prior.empty() ? io::PriorSpec{} : io::prior_from_json(io::read_json(o.prior));
    const double noise = frame.noise_std > 0.0 ? frame.noise_std : 1e-3 * frame.voltages.cwiseAbs().maxCoeff();
    const PriorModel prior = build_prior(*mesh, spec.mean, spec.std, spec.correlation_length, noise);
    LMConfig lm;
    lm.max_iterations = o.max_iterations;
    say("homogeneous start");
    const HomogeneousFit start = fit_homogeneous(frame, model, o.sigma0, o.zeta0, lm);
    const ParameterVector init =
        ParameterVector::nodal(std::vector<double>(mesh->vertices().size(), start.sigma), start.contacts);
    say("MAP iteration");
    const Reconstruction rec = reconstruct_map(frame, model, prior, init, lm);
    io::write_nodal(dir / "sigma.csv", mesh->vertices(), rec.sigma, "sigma");
    io::Json out = contacts_json(rec.contacts, o.model);
    out["relative_discrepancy"] = rec.relative_discrepancy;
    out["converged"] = rec.lm.converged;
    out["stop_reason"] = rec.lm.stop_reason;
    out["iterations"] = rec.lm.iterations;
    out["homogeneous_start"] = start.sigma;
    io::write_json(dir / "contacts.json", out);
    io::write_iterations(dir / "iterations.csv", rec.lm);
    std::cout << "MAP: relative discrepancy " << rec.relative_discrepancy << ", sigma in ["
              << *std::min_element(rec.sigma.begin(), rec.sigma.end()) << ", "
              << *std::max_element(rec.sigma.begin(), rec.sigma.end()) << "] (" << rec.lm.stop_reason << ", "
              << rec.lm.iterations << " iterations)\n";
    if (!rec.lm.converged) say("warning: the reconstruction did not converge");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Smoothened complete electrode model: forward solves, studies and reconstructions", "scem"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a TOML file (e.g. a config.toml echoed by a run)");
    Global g;
    if (const char* env = std::getenv("SCEM_OUT_DIR"); env != nullptr && *env != '\0') g.out = env;
    app.add_option("--out", g.out, "output directory (default $SCEM_OUT_DIR or ./out)")->capture_default_str();
    app.add_option("--threads", g.threads, "worker cap for sweeps")->check(CLI::PositiveNumber)->capture_default_str();

    ModelOptions mesh_opts;
    auto* mesh_cmd = app.add_subcommand("mesh", "build a mesh and export it as JSON")->configurable();
    mesh_opts.level = 3;
    mesh_opts.add_to(mesh_cmd);

    ModelOptions fwd_opts;
    ForwardOptions fwd_extra;
    auto* fwd_cmd = app.add_subcommand("forward", "solve one current pattern")->configurable();
    fwd_opts.add_to(fwd_cmd);
    fwd_cmd->add_option("--pattern", fwd_extra.pattern, "comma separated currents (default e_M - e_1)");
    fwd_cmd->add_flag("--nodal", fwd_extra.nodal, "also write u.csv");

    auto* study = app.add_subcommand("study", "model-difference and convergence studies")->configurable();
    study->require_subcommand(1);
    SweepOptions diff_opts, scale_opts;
    auto* diff_cmd = study->add_subcommand("difference", "d_U over sigma/zeta with equal-area hats")->configurable();
    add_sweep(diff_cmd, diff_opts, 10);
    auto* scale_cmd = study->add_subcommand("scaling", "optimal hat half-height over sigma/zeta")->configurable();
    add_sweep(scale_cmd, scale_opts, 8);
    RateOptions rate_opts, deriv_opts;
    auto* rate_cmd = study->add_subcommand("rates", "FEM convergence of U against a reference level")->configurable();
    add_rates(rate_cmd, rate_opts, false);
    auto* deriv_cmd = study->add_subcommand("deriv", "convergence of the derivative integrals (P1)")->configurable();
    add_rates(deriv_cmd, deriv_opts, true);

    SynthOptions synth_opts;
    auto* synth_cmd = app.add_subcommand("synth", "synthetic measurement frame from a phantom")->configurable();
    synth_cmd->add_option("--phantom", synth_opts.phantom, "phantom file")->required();
    synth_cmd->add_option("--layout", synth_opts.layout)->capture_default_str();
    synth_cmd->add_option("--model", synth_opts.model)->check(CLI::IsMember({"box", "hat"}))->capture_default_str();
    synth_cmd->add_option("--zeta", synth_opts.zeta, "contact parameter on every electrode")->capture_default_str();
    synth_cmd->add_option("--profile", synth_opts.profile, "contact profile file (overrides layout/model/zeta)");
    synth_cmd->add_option("--fine-level", synth_opts.fine_level)->capture_default_str();
    synth_cmd->add_option("--order", synth_opts.order)->check(CLI::IsMember({1, 2}))->capture_default_str();
    synth_cmd->add_option("--noise", synth_opts.noise, "std relative to the voltage range")->capture_default_str();
    synth_cmd->add_option("--seed", synth_opts.seed)->capture_default_str();

    auto* invert = app.add_subcommand("invert", "least-squares and MAP reconstructions")->configurable();
    invert->require_subcommand(1);
    InvertOptions hom_opts, map_opts;
    auto* hom_cmd = invert->add_subcommand("homogeneous", "fit one conductivity and the contacts")->configurable();
    add_invert(hom_cmd, hom_opts);
    auto* map_cmd = invert->add_subcommand("map", "MAP estimate with a Gaussian prior")->configurable();
    map_opts.max_iterations = 150;  // the nodal fit creeps along a flat valley
    add_invert(map_cmd, map_opts);
    map_cmd->add_option("--prior", map_opts.prior, "prior parameter file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (mesh_cmd->parsed()) cmd_mesh(g, app, mesh_opts);
        else if (fwd_cmd->parsed()) cmd_forward(g, app, fwd_opts, fwd_extra);
        else if (diff_cmd->parsed()) cmd_difference(g, app, diff_opts);
        else if (scale_cmd->parsed()) cmd_scaling(g, app, scale_opts);
        else if (rate_cmd->parsed()) cmd_rates(g, app, rate_opts);
        else if (deriv_cmd->parsed()) cmd_deriv(g, app, deriv_opts);
        else if (synth_cmd->parsed()) cmd_synth(g, app, synth_opts);
        else if (hom_cmd->parsed()) cmd_homogeneous(g, app, hom_opts);
        else if (map_cmd->parsed()) cmd_map(g, app, map_opts);
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace scem
