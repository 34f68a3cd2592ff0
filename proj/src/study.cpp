#include "scem/study.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "scem/errors.hpp"

namespace scem {

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ParameterError("log_grid needs 0 < lo < hi and count >= 2");
    std::vector<double> out(count);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

PotentialSet electrode_potentials(const ForwardSolver& solver, std::span<const CurrentPattern> patterns) {
    PotentialSet out;
    for (auto& sol : solver.solve(patterns)) out.push_back(std::move(sol.U));
    return out;
}

double relative_difference(const PotentialSet& U, const PotentialSet& reference) {
    if (U.size() != reference.size()) throw ContractError("potential sets have different pattern counts");
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < U.size(); ++m) {
        num += (U[m] - reference[m]).squaredNorm();
        den += reference[m].squaredNorm();
    }
    if (!(den > 0.0)) throw NumericalError("reference potentials vanish");
    return std::sqrt(num / den);
}

double relative_difference(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma,
                           const ConductanceProfile& zeta_box, const ConductanceProfile& zeta_hat) {
    if (zeta_box.electrode_count() != zeta_hat.electrode_count()) {
        throw ContractError("profiles have different electrode counts");
    }
    const auto patterns = difference_patterns(zeta_box.electrode_count());
    const PotentialSet box = electrode_potentials(make_solver(mesh, sigma, zeta_box), patterns);
    const PotentialSet hat = electrode_potentials(make_solver(mesh, sigma, zeta_hat), patterns);
    return relative_difference(hat, box);
}

namespace {

struct GoldenResult {
    double x = 0.0;
    double f = 0.0;
};

template <class F>
GoldenResult golden_section(F&& f, double a, double b, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

}  // namespace

ScalingResult optimize_scaling(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma, double zeta_box,
                               const ScalingOptions& options) {
    if (!(zeta_box > 0.0)) throw ParameterError("box conductance must be positive");
    if (!(options.lower_factor > 0.0) || !(options.upper_factor > options.lower_factor) ||
        !(options.relative_tolerance > 0.0) || !(options.widen_factor > 1.0)) {
        throw ParameterError("invalid scaling search options");
    }
    const ElectrodeLayout& layout = mesh->layout();
    const auto patterns = difference_patterns(layout.size());
    const PotentialSet box =
        electrode_potentials(make_solver(mesh, sigma, make_profile(layout, ProfileKind::Box, zeta_box)), patterns);

    ScalingResult result;
    result.zeta_box = zeta_box;
    auto objective = [&](double log_hat) {
        ++result.evaluations;
        const auto hat = make_profile(layout, ProfileKind::Hat, std::exp(log_hat));
        return relative_difference(electrode_potentials(make_solver(mesh, sigma, hat), patterns), box);
    };
    result.default_difference = objective(std::log(zeta_box));

    double lo = std::log(zeta_box * options.lower_factor);
    double hi = std::log(zeta_box * options.upper_factor);
    const double tol = options.relative_tolerance;
    GoldenResult best = golden_section(objective, lo, hi, tol);
    auto at_edge = [&](double x) { return x - lo < 2.0 * tol || hi - x < 2.0 * tol; };
    if (at_edge(best.x)) {
        result.widened = true;
        const double w = std::log(options.widen_factor);
        if (best.x - lo < 2.0 * tol) {
            lo -= w;
        } else {
            hi += w;
        }
        best = golden_section(objective, lo, hi, tol);
        result.at_bracket_edge = at_edge(best.x);
    }
    result.zeta_hat = std::exp(best.x);
    result.difference = best.f;
    return result;
}

namespace {

std::string describe(const std::exception& e) { return e.what(); }

}  // namespace

DifferenceCurve difference_sweep(std::shared_ptr<const Mesh> mesh, double sigma, std::span<const double> ratios,
                                 std::size_t threads) {
    struct Outcome {
        bool ok = false;
        double value = 0.0;
        std::string message;
    };
    const ConductivityField field = ConductivityField::constant(sigma);
    const auto outcomes = parallel_map(ratios.size(), threads, [&](std::size_t i) {
        Outcome o;
        try {
            const double zeta = sigma / ratios[i];
            o.value = relative_difference(mesh, field, make_profile(mesh->layout(), ProfileKind::Box, zeta),
                                          make_profile(mesh->layout(), ProfileKind::Hat, zeta));
            o.ok = std::isfinite(o.value);
            if (!o.ok) o.message = "non-finite relative difference";
        } catch (const NumericalError& e) {
            o.message = describe(e);
        }
        return o;
    });
    DifferenceCurve curve;
    curve.level = mesh->level();
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (outcomes[i].ok) {
            curve.samples.push_back({ratios[i], outcomes[i].value});
        } else {
            curve.failures.push_back({ratios[i], outcomes[i].message});
        }
    }
    return curve;
}

ScalingCurve scaling_sweep(std::shared_ptr<const Mesh> mesh, double sigma, std::span<const double> ratios,
                           const ScalingOptions& options, std::size_t threads) {
    struct Outcome {
        bool ok = false;
        ScalingResult result;
        std::string message;
    };
    const ConductivityField field = ConductivityField::constant(sigma);
    const auto outcomes = parallel_map(ratios.size(), threads, [&](std::size_t i) {
        Outcome o;
        try {
            o.result = optimize_scaling(mesh, field, sigma / ratios[i], options);
            o.ok = std::isfinite(o.result.difference);
            if (!o.ok) o.message = "non-finite relative difference";
        } catch (const NumericalError& e) {
            o.message = describe(e);
        }
        return o;
    });
    ScalingCurve curve;
    curve.level = mesh->level();
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (outcomes[i].ok) {
            curve.samples.push_back({ratios[i], outcomes[i].result});
        } else {
            curve.failures.push_back({ratios[i], outcomes[i].message});
        }
    }
    return curve;
}

ConductivityProvider constant_conductivity(double sigma) {
    const ConductivityField field = ConductivityField::constant(sigma);
    return [field](const Mesh&) { return field; };
}

const RateFit& RateTable::fit(const std::string& label, const std::string& model, int order) const {
    for (const RateFit& f : fits) {
        if (f.label == label && f.model == model && f.order == order) return f;
    }
    throw IndexError("no rate fit for " + label + "/" + model + "/P" + std::to_string(order));
}

std::vector<RateRow> RateTable::series(const std::string& label, const std::string& model, int order) const {
    std::vector<RateRow> out;
    for (const RateRow& r : rows) {
        if (r.label == label && r.model == model && r.order == order) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const RateRow& a, const RateRow& b) { return a.level < b.level; });
    return out;
}

std::vector<DerivativeRow> DerivativeTable::series(const std::string& label, const std::string& model) const {
    std::vector<DerivativeRow> out;
    for (const DerivativeRow& r : rows) {
        if (r.label == label && r.model == model) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const DerivativeRow& a, const DerivativeRow& b) { return a.level < b.level; });
    return out;
}

double fitted_slope(std::span<const RateRow> series, std::size_t points) {
    std::vector<const RateRow*> rows;
    for (const RateRow& r : series) {
        if (r.error > 0.0) rows.push_back(&r);
    }
    std::sort(rows.begin(), rows.end(), [](const RateRow* a, const RateRow* b) { return a->level < b->level; });
    if (rows.size() > points) rows.erase(rows.begin(), rows.end() - static_cast<std::ptrdiff_t>(points));
    if (rows.size() < 2) throw NumericalError("need at least two positive errors to fit a slope");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rows.size());
    for (const RateRow* r : rows) {
        const double x = std::log(r->h), y = std::log(r->error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double lower_triangle_relative_error(const Eigen::MatrixXd& value, const Eigen::MatrixXd& reference) {
    if (value.rows() != reference.rows() || value.cols() != reference.cols()) {
        throw ContractError("integral matrices have different sizes");
    }
    double num = 0.0, den = 0.0;
    for (Eigen::Index m = 0; m < value.rows(); ++m) {
        for (Eigen::Index n = 0; n <= m; ++n) {
            const double d = value(m, n) - reference(m, n);
            num += d * d;
            den += reference(m, n) * reference(m, n);
        }
    }
    if (!(den > 0.0)) throw NumericalError("reference integrals vanish");
    return std::sqrt(num / den);
}

namespace {

struct LevelOutcome {
    PotentialSet U;
    DerivativeIntegrals integrals;
};

LevelOutcome run_level(const ElectrodeLayout& layout, const ConvergenceCase& c, int level, bool derivatives) {
    auto mesh = std::make_shared<const Mesh>(build_mesh(level, layout, c.order));
    const ForwardSolver solver = make_solver(mesh, c.sigma(*mesh), c.zeta);
    const auto sols = solver.solve(difference_patterns(layout.size()));
    LevelOutcome out;
    for (const auto& s : sols) out.U.push_back(s.U);
    if (derivatives) out.integrals = derivative_integrals(sols, c.zeta);
    return out;
}

}  // namespace

ConvergenceResult convergence_suite(const ElectrodeLayout& layout, std::span<const ConvergenceCase> cases,
                                    const ConvergenceOptions& options) {
    if (options.levels.empty()) throw ParameterError("convergence study needs at least one level");
    const int finest = *std::max_element(options.levels.begin(), options.levels.end());
    if (options.reference_level <= finest + 1) {
        std::ostringstream msg;
        msg << "reference level " << options.reference_level << " must exceed the finest level " << finest
            << " by at least 2";
        throw ContractError(msg.str());
    }
    for (const ConvergenceCase& c : cases) {
        if (c.order != 1 && c.order != 2) throw ParameterError("element order must be 1 or 2");
        if (!c.sigma) throw ContractError("convergence case without a conductivity");
    }
    std::vector<int> levels = options.levels;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    struct CaseOutcome {
        std::vector<RateRow> rates;
        std::vector<DerivativeRow> derivatives;
    };
    std::size_t done = 0;
    std::mutex progress_lock;
    const auto outcomes = parallel_map(cases.size(), options.threads, [&](std::size_t i) {
        const ConvergenceCase& c = cases[i];
        const bool with_derivs = options.derivatives && c.order == 1;
        CaseOutcome out;
        LevelOutcome reference = run_level(layout, c, options.reference_level, with_derivs);
        for (int level : levels) {
            const LevelOutcome lv = run_level(layout, c, level, with_derivs);
            const double h = std::ldexp(1.0, -level);
            out.rates.push_back({c.label, c.model, c.order, level, h, relative_difference(lv.U, reference.U)});
            if (with_derivs) {
                DerivativeRow row{c.label, c.model, level, h, {}};
                row.delta[0] = lower_triangle_relative_error(lv.integrals.I1, reference.integrals.I1);
                row.delta[1] = lower_triangle_relative_error(lv.integrals.I2, reference.integrals.I2);
                row.delta[2] = lower_triangle_relative_error(lv.integrals.I3, reference.integrals.I3);
                out.derivatives.push_back(row);
            }
        }
        if (options.progress) {
            std::lock_guard<std::mutex> g(progress_lock);
            options.progress(++done, cases.size());
        }
        return out;
    });

    ConvergenceResult result;
    result.rates.reference_level = options.reference_level;
    result.derivatives.reference_level = options.reference_level;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& o = outcomes[i];
        result.rates.rows.insert(result.rates.rows.end(), o.rates.begin(), o.rates.end());
        result.derivatives.rows.insert(result.derivatives.rows.end(), o.derivatives.begin(), o.derivatives.end());
        RateFit fit{cases[i].label, cases[i].model, cases[i].order, 0.0, 0, 0};
        const std::size_t used = std::min(options.fit_points, o.rates.size());
        if (used >= 2) {
            fit.slope = fitted_slope(o.rates, used);
            fit.first_level = o.rates[o.rates.size() - used].level;
            fit.last_level = o.rates.back().level;
        }
        result.rates.fits.push_back(fit);
    }
    return result;
}

RateTable convergence_study(const ElectrodeLayout& layout, std::span<const ConvergenceCase> cases,
                            std::vector<int> levels, int reference_level, std::size_t threads) {
    ConvergenceOptions options;
    options.levels = std::move(levels);
    options.reference_level = reference_level;
    options.threads = threads;
    return convergence_suite(layout, cases, options).rates;
}

DerivativeTable derivative_convergence(const ElectrodeLayout& layout, std::span<const ConvergenceCase> cases,
                                       std::vector<int> levels, int reference_level, std::size_t threads) {
    for (const ConvergenceCase& c : cases) {
        if (c.order != 1) throw ParameterError("derivative convergence uses piecewise linear elements");
    }
    ConvergenceOptions options;
    options.levels = std::move(levels);
    options.reference_level = reference_level;
    options.threads = threads;
    options.derivatives = true;
    return convergence_suite(layout, cases, options).derivatives;
}

}  // namespace scem
