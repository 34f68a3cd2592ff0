#include "scem/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "scem/errors.hpp"

namespace scem::io {

namespace {

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ContractError("cannot write " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    return out;
}

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ContractError(std::string("malformed ") + what + ": " + e.what());
    }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ContractError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& value) {
    auto out = open_output(path);
    out << value.dump(2) << '\n';
}

ElectrodeLayout load_layout(const std::string& name_or_path) {
    if (name_or_path == "default8") return ElectrodeLayout::default8();
    if (name_or_path == "default12") return ElectrodeLayout::default12();
    if (name_or_path == "default16") return ElectrodeLayout::default16();
    if (!fs::exists(name_or_path)) {
        throw ContractError("unknown layout '" + name_or_path + "' (expected default8, default12, default16 or a file)");
    }
    return layout_from_json(read_json(name_or_path));
}

ElectrodeLayout layout_from_json(const Json& j) {
    return guarded("layout", [&] {
        std::vector<Arc> arcs;
        for (const auto& e : j.at("electrodes")) {
            const auto& arc = e.at("arc");
            arcs.push_back({arc.at(0).get<double>(), arc.at(1).get<double>()});
        }
        return ElectrodeLayout(std::move(arcs));
    });
}

Json to_json(const ElectrodeLayout& layout) {
    Json electrodes = Json::array();
    for (const Arc& a : layout.arcs()) electrodes.push_back({{"arc", {a.begin, a.end}}});
    return {{"electrodes", electrodes}};
}

Json to_json(const Mesh& mesh) {
    Json nodes = Json::array();
    for (const Point& p : mesh.vertices()) nodes.push_back({p.x, p.y});
    Json tris = Json::array();
    for (const auto& t : mesh.triangles()) tris.push_back({t[0], t[1], t[2]});
    Json edges = Json::array();
    for (const BoundaryEdge& e : mesh.boundary_edges()) {
        edges.push_back({{"nodes", {e.vertices[0], e.vertices[1]}}, {"arc", {e.s0, e.s1}}, {"electrode", e.electrode}});
    }
    return {{"level", mesh.level()},
            {"order", mesh.order()},
            {"h", mesh.h()},
            {"nodes", nodes},
            {"triangles", tris},
            {"boundary_edges", edges},
            {"layout", to_json(mesh.layout())}};
}

Json to_json(const ConductanceProfile& profile) {
    Json electrodes = Json::array();
    for (std::size_t m = 0; m < profile.electrode_count(); ++m) {
        const Arc& a = profile.layout().arc(m);
        Json e = {{"arc", {a.begin, a.end}}};
        if (profile.kind() == ProfileKind::Custom) {
            e["knots"] = std::vector<double>(profile.knots(m).begin(), profile.knots(m).end());
            e["values"] = std::vector<double>(profile.values(m).begin(), profile.values(m).end());
        } else {
            e["height"] = profile.heights()[m];
        }
        electrodes.push_back(e);
    }
    return {{"kind", to_string(profile.kind())}, {"electrodes", electrodes}};
}

ConductanceProfile profile_from_json(const Json& j) {
    return guarded("profile", [&] {
        const ElectrodeLayout layout = layout_from_json(j);
        const ProfileKind kind = profile_kind_from_string(j.at("kind").get<std::string>());
        // The layout constructor sorts arcs; read the parameters in that order.
        std::vector<std::pair<double, const Json*>> entries;
        for (const auto& e : j.at("electrodes")) entries.emplace_back(e.at("arc").at(0).get<double>(), &e);
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        if (kind == ProfileKind::Custom) {
            std::vector<std::vector<double>> knots, values;
            for (const auto& [s, e] : entries) {
                knots.push_back(e->at("knots").get<std::vector<double>>());
                values.push_back(e->at("values").get<std::vector<double>>());
            }
            return make_custom_profile(layout, std::move(knots), std::move(values));
        }
        std::vector<double> heights;
        for (const auto& [s, e] : entries) heights.push_back(e->at("height").get<double>());
        return make_profile(layout, kind, std::move(heights));
    });
}

Json to_json(const CurrentPattern& pattern) { return to_vector(pattern.values()); }

CurrentPattern pattern_from_json(const Json& j) {
    return guarded("current pattern", [&] { return CurrentPattern(to_eigen(j.get<std::vector<double>>())); });
}

Json to_json(const ForwardSolution& solution) {
    return {{"U", to_vector(solution.U)},
            {"pattern", to_json(solution.pattern)},
            {"level", solution.mesh->level()},
            {"order", solution.mesh->order()},
            {"grounding", "zero-mean"}};
}

Json to_json(const MeasurementFrame& frame) {
    Json patterns = Json::array();
    for (const auto& p : frame.patterns) patterns.push_back(to_json(p));
    return {{"patterns", patterns},
            {"voltages", to_vector(frame.voltages)},
            {"noise_std", frame.noise_std},
            {"seed", frame.seed},
            {"meta",
             {{"relative_noise", frame.relative_noise},
              {"level", frame.level},
              {"order", frame.order},
              {"model", frame.model}}}};
}

MeasurementFrame frame_from_json(const Json& j) {
    return guarded("measurement frame", [&] {
        MeasurementFrame frame;
        for (const auto& p : j.at("patterns")) frame.patterns.push_back(pattern_from_json(p));
        frame.voltages = to_eigen(j.at("voltages").get<std::vector<double>>());
        frame.noise_std = j.value("noise_std", 0.0);
        frame.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("meta")) {
            const Json& meta = j.at("meta");
            frame.relative_noise = meta.value("relative_noise", 0.0);
            frame.level = meta.value("level", -1);
            frame.order = meta.value("order", 1);
            frame.model = meta.value("model", std::string());
        }
        const std::size_t M = frame.electrode_count();
        if (frame.voltages.size() != static_cast<Eigen::Index>(M * frame.patterns.size())) {
            throw ContractError("frame has " + std::to_string(frame.voltages.size()) + " voltages for " +
                                std::to_string(frame.patterns.size()) + " patterns of length " + std::to_string(M));
        }
        frame.normalize();
        return frame;
    });
}

Json to_json(const Phantom& phantom) {
    Json inclusions = Json::array();
    for (const Inclusion& inc : phantom.inclusions) {
        inclusions.push_back({{"shape", inc.shape == Inclusion::Shape::Disk ? "disk" : "gaussian"},
                              {"center", {inc.center.x, inc.center.y}},
                              {"radius", inc.radius},
                              {"value", inc.value}});
    }
    return {{"background", phantom.background}, {"base_level", phantom.base_level}, {"inclusions", inclusions}};
}

Phantom phantom_from_json(const Json& j) {
    return guarded("phantom", [&] {
        Phantom p;
        p.background = j.at("background").get<double>();
        p.base_level = j.value("base_level", 4);
        for (const auto& e : j.value("inclusions", Json::array())) {
            Inclusion inc;
            const std::string shape = e.at("shape").get<std::string>();
            if (shape == "disk") {
                inc.shape = Inclusion::Shape::Disk;
            } else if (shape == "gaussian") {
                inc.shape = Inclusion::Shape::Gaussian;
            } else {
                throw ContractError("unknown inclusion shape '" + shape + "'");
            }
            inc.center = {e.at("center").at(0).get<double>(), e.at("center").at(1).get<double>()};
            inc.radius = e.at("radius").get<double>();
            inc.value = e.at("value").get<double>();
            if (!(inc.radius > 0.0)) throw ParameterError("inclusion radius must be positive");
            p.inclusions.push_back(inc);
        }
        if (!(p.background > 0.0)) throw ParameterError("phantom background must be positive");
        if (p.base_level < 2) throw ParameterError("phantom base level must be at least 2");
        return p;
    });
}

Json to_json(const PriorSpec& prior) {
    return {{"mean", prior.mean}, {"std", prior.std}, {"correlation_length", prior.correlation_length}};
}

PriorSpec prior_from_json(const Json& j) {
    return guarded("prior", [&] {
        PriorSpec p;
        p.mean = j.value("mean", p.mean);
        p.std = j.value("std", p.std);
        p.correlation_length = j.value("correlation_length", p.correlation_length);
        return p;
    });
}

void write_difference_curve(const fs::path& path, const DifferenceCurve& curve) {
    auto out = open_output(path);
    out << "ratio,d_U\n";
    for (const auto& s : curve.samples) out << s.ratio << ',' << s.difference << '\n';
}

void write_scaling_curve(const fs::path& path, const ScalingCurve& curve) {
    auto out = open_output(path);
    out << "ratio,zeta_box,zeta_hat,d_U_opt,d_U_default,evaluations,at_bracket_edge\n";
    for (const auto& s : curve.samples) {
        const ScalingResult& r = s.result;
        out << s.ratio << ',' << r.zeta_box << ',' << r.zeta_hat << ',' << r.difference << ','
            << r.default_difference << ',' << r.evaluations << ',' << (r.at_bracket_edge ? 1 : 0) << '\n';
    }
}

void write_rates(const fs::path& path, const RateTable& table) {
    auto out = open_output(path);
    out << "case,model,order,level,h,error,slope\n";
    for (const auto& r : table.rows) {
        const RateFit& fit = table.fit(r.label, r.model, r.order);
        out << r.label << ',' << r.model << ',' << r.order << ',' << r.level << ',' << r.h << ',' << r.error << ','
            << fit.slope << '\n';
    }
}

void write_deriv_rates(const fs::path& path, const DerivativeTable& table) {
    auto out = open_output(path);
    out << "i,case,model,level,h,delta\n";
    for (int i = 0; i < 3; ++i) {
        for (const auto& r : table.rows) {
            out << i + 1 << ',' << r.label << ',' << r.model << ',' << r.level << ',' << r.h << ','
                << r.delta[static_cast<std::size_t>(i)] << '\n';
        }
    }
}

void write_nodal(const fs::path& path, std::span<const Point> points, std::span<const double> values,
                 const std::string& name) {
    if (points.size() != values.size()) throw ContractError("nodal values do not match the points");
    auto out = open_output(path);
    out << "node,x,y," << name << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << i << ',' << points[i].x << ',' << points[i].y << ',' << values[i] << '\n';
    }
}

void write_iterations(const fs::path& path, const LMResult& result) {
    auto out = open_output(path);
    out << "iter,data_misfit,prior_term,lambda,accepted\n";
    for (const auto& r : result.history) {
        out << r.iteration << ',' << r.data_misfit << ',' << r.prior_term << ',' << r.lambda << ','
            << (r.accepted ? 1 : 0) << '\n';
    }
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& matrix, const std::string& corner) {
    auto out = open_output(path);
    const auto M = matrix.cols() + 1;
    out << corner;
    for (Eigen::Index m = 0; m < matrix.cols(); ++m) out << ",e" << m + 1 << "-e" << M;
    out << '\n';
    for (Eigen::Index n = 0; n < matrix.rows(); ++n) {
        out << 'e' << n + 1 << "-e" << M;
        for (Eigen::Index m = 0; m < matrix.cols(); ++m) out << ',' << matrix(n, m);
        out << '\n';
    }
}

}  // namespace scem::io
