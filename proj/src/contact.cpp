#include "scem/contact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scem/errors.hpp"

namespace scem {

namespace {

// Index of the linear piece of `knots` containing s (clamped to the range).
std::size_t piece_of(std::span<const double> knots, double s) {
    auto it = std::upper_bound(knots.begin(), knots.end(), s);
    std::size_t k = (it == knots.begin()) ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
    return std::min(k, knots.size() - 2);
}

double interpolate(std::span<const double> knots, std::span<const double> values, double s) {
    const std::size_t k = piece_of(knots, s);
    const double t = (s - knots[k]) / (knots[k + 1] - knots[k]);
    return (1.0 - t) * values[k] + t * values[k + 1];
}

}  // namespace

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Box: return "box";
        case ProfileKind::Hat: return "hat";
        default: return "custom";
    }
}

ProfileKind profile_kind_from_string(const std::string& name) {
    if (name == "box") return ProfileKind::Box;
    if (name == "hat") return ProfileKind::Hat;
    if (name == "custom") return ProfileKind::Custom;
    throw ParameterError("unknown conductance profile kind '" + name + "'");
}

ConductanceDerivative::ConductanceDerivative(ElectrodeLayout layout,
                                             std::vector<std::vector<double>> knots,
                                             std::vector<std::vector<double>> slopes,
                                             std::vector<DeltaWeight> deltas)
    : layout_(std::move(layout)),
      knots_(std::move(knots)),
      slopes_(std::move(slopes)),
      deltas_(std::move(deltas)) {}

double ConductanceDerivative::slope(double s) const {
    const auto m = layout_.electrode_at(s);
    if (!m) return 0.0;
    return slopes_[*m][piece_of(knots_[*m], s)];
}

double ConductanceDerivative::smooth_integral(std::size_t electrode) const {
    const auto& t = knots_.at(electrode);
    const auto& d = slopes_.at(electrode);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) sum += d[k] * (t[k + 1] - t[k]);
    return sum;
}

double ConductanceProfile::eval(double s) const {
    if (!(s >= 0.0 && s < kPerimeter)) {
        std::ostringstream msg;
        msg << "arclength " << s << " outside [0, 4)";
        throw DomainError(msg.str());
    }
    const auto m = layout_.electrode_at(s);
    if (!m) return 0.0;
    return interpolate(knots_[*m], values_[*m], s);
}

double ConductanceProfile::eval_on(std::size_t electrode, double s) const {
    const Arc& a = layout_.arc(electrode);
    if (s < a.begin || s > a.end) return 0.0;
    return interpolate(knots_[electrode], values_[electrode], s);
}

double ConductanceProfile::integral(std::size_t electrode) const {
    const auto& t = knots_.at(electrode);
    const auto& v = values_.at(electrode);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) sum += 0.5 * (v[k] + v[k + 1]) * (t[k + 1] - t[k]);
    return sum;
}

double ConductanceProfile::total_integral() const {
    double sum = 0.0;
    for (std::size_t m = 0; m < electrode_count(); ++m) sum += integral(m);
    return sum;
}

double ConductanceProfile::shape(std::size_t electrode, double s) const {
    const Arc& a = layout_.arc(electrode);
    if (s < a.begin || s > a.end) return 0.0;
    switch (kind_) {
        case ProfileKind::Box: return 1.0;
        case ProfileKind::Hat: return 2.0 * (1.0 - std::abs(s - a.midpoint()) / (0.5 * a.width()));
        default: throw ContractError("custom conductance profiles have no height parameters");
    }
}

ConductanceProfile ConductanceProfile::with_heights(std::vector<double> heights) const {
    if (kind_ == ProfileKind::Custom) {
        throw ContractError("custom conductance profiles have no height parameters");
    }
    return make_profile(layout_, kind_, std::move(heights));
}

ConductanceProfile ConductanceProfile::scaled(double c) const {
    if (!(c > 0.0)) throw ParameterError("profile scale factor must be positive");
    ConductanceProfile out = *this;
    for (double& v : out.heights_) v *= c;
    for (auto& vals : out.values_) {
        for (double& v : vals) v *= c;
    }
    return out;
}

void ConductanceProfile::finalize() {
    breakpoints_.clear();
    for (const auto& t : knots_) breakpoints_.insert(breakpoints_.end(), t.begin(), t.end());
    std::sort(breakpoints_.begin(), breakpoints_.end());
}

ConductanceProfile make_profile(const ElectrodeLayout& layout, ProfileKind kind,
                                std::vector<double> heights) {
    if (kind == ProfileKind::Custom) {
        throw ParameterError("use make_custom_profile for custom conductance profiles");
    }
    if (heights.size() != layout.size()) {
        std::ostringstream msg;
        msg << "expected " << layout.size() << " contact heights, got " << heights.size();
        throw ParameterError(msg.str());
    }
    for (std::size_t m = 0; m < heights.size(); ++m) {
        if (!(heights[m] > 0.0) || !std::isfinite(heights[m])) {
            std::ostringstream msg;
            msg << "contact height of electrode " << m + 1 << " must be positive, got " << heights[m];
            throw ParameterError(msg.str());
        }
    }
    ConductanceProfile p(kind, layout);
    for (std::size_t m = 0; m < layout.size(); ++m) {
        const Arc& a = layout.arc(m);
        if (kind == ProfileKind::Box) {
            p.knots_.push_back({a.begin, a.end});
            p.values_.push_back({heights[m], heights[m]});
        } else {
            p.knots_.push_back({a.begin, a.midpoint(), a.end});
            p.values_.push_back({0.0, 2.0 * heights[m], 0.0});
        }
    }
    p.heights_ = std::move(heights);
    p.finalize();
    return p;
}

ConductanceProfile make_profile(const ElectrodeLayout& layout, ProfileKind kind, double height) {
    return make_profile(layout, kind, std::vector<double>(layout.size(), height));
}

ConductanceProfile make_custom_profile(const ElectrodeLayout& layout,
                                       std::vector<std::vector<double>> knots,
                                       std::vector<std::vector<double>> values) {
    if (knots.size() != layout.size() || values.size() != layout.size()) {
        throw ParameterError("custom profile needs knots and values for every electrode");
    }
    for (std::size_t m = 0; m < layout.size(); ++m) {
        const Arc& a = layout.arc(m);
        const auto& t = knots[m];
        const auto& v = values[m];
        if (t.size() < 2 || t.size() != v.size()) {
            throw ParameterError("custom profile knots and values must have equal length >= 2");
        }
        if (t.front() != a.begin || t.back() != a.end) {
            throw ParameterError("custom profile knots must start and end at the electrode endpoints");
        }
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (k > 0 && !(t[k] > t[k - 1])) {
                throw ParameterError("custom profile knots must be strictly increasing");
            }
            if (!(v[k] >= 0.0) || !std::isfinite(v[k])) {
                throw ParameterError("custom profile values must be nonnegative");
            }
        }
    }
    ConductanceProfile p(ProfileKind::Custom, layout);
    p.knots_ = std::move(knots);
    p.values_ = std::move(values);
    p.finalize();
    return p;
}

ConductanceDerivative arclength_derivative(const ConductanceProfile& profile) {
    std::vector<std::vector<double>> knots;
    std::vector<std::vector<double>> slopes;
    std::vector<DeltaWeight> deltas;
    for (std::size_t m = 0; m < profile.electrode_count(); ++m) {
        const auto t = profile.knots(m);
        const auto v = profile.values(m);
        knots.emplace_back(t.begin(), t.end());
        std::vector<double> d;
        for (std::size_t k = 0; k + 1 < t.size(); ++k) d.push_back((v[k + 1] - v[k]) / (t[k + 1] - t[k]));
        slopes.push_back(std::move(d));
        // Jumps from / back to the zero gap value.
        if (v.front() != 0.0) deltas.push_back({t.front(), v.front(), m});
        if (v.back() != 0.0) deltas.push_back({t.back(), -v.back(), m});
    }
    return ConductanceDerivative(profile.layout(), std::move(knots), std::move(slopes), std::move(deltas));
}

}  // namespace scem
