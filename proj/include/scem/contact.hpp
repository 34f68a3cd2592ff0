#pragma once

#include <span>
#include <string>
#include <vector>

#include "scem/mesh.hpp"

namespace scem {

/// Box: constant height on each electrode (traditional model).
/// Hat: piecewise linear, zero at the electrode ends, peak 2*height at the
///      midpoint, so the area equals that of a box with the same parameter.
/// Custom: user-given piecewise-linear values per electrode.
enum class ProfileKind { Box, Hat, Custom };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

/// Point mass of the arclength derivative of a discontinuous profile.
struct DeltaWeight {
    double s = 0.0;
    double weight = 0.0;
    std::size_t electrode = 0;
};

/// Arclength derivative of a contact conductance: a piecewise-constant
/// slope plus point masses at jumps (box ends).
class ConductanceDerivative {
public:
    ConductanceDerivative(ElectrodeLayout layout, std::vector<std::vector<double>> knots,
                          std::vector<std::vector<double>> slopes, std::vector<DeltaWeight> deltas);

    const ElectrodeLayout& layout() const { return layout_; }
    double slope(double s) const;
    std::span<const DeltaWeight> deltas() const { return deltas_; }
    std::span<const double> knots(std::size_t electrode) const { return knots_.at(electrode); }
    std::span<const double> slopes(std::size_t electrode) const { return slopes_.at(electrode); }
    /// Integral of the smooth part over electrode `electrode`.
    double smooth_integral(std::size_t electrode) const;

private:
    ElectrodeLayout layout_;
    std::vector<std::vector<double>> knots_;
    std::vector<std::vector<double>> slopes_;
    std::vector<DeltaWeight> deltas_;
};

/// Contact conductance zeta on the boundary, defined in arclength space so
/// the same profile can be used on every refinement level. On each electrode
/// it is piecewise linear between knots; it vanishes on the gaps.
class ConductanceProfile {
public:
    ProfileKind kind() const { return kind_; }
    const ElectrodeLayout& layout() const { return layout_; }
    std::size_t electrode_count() const { return layout_.size(); }

    /// Box heights or hat half-heights; empty for Custom profiles.
    std::span<const double> heights() const { return heights_; }

    double operator()(double s) const { return eval(s); }
    double eval(double s) const;

    /// Value on electrode `electrode` at arclength s, extended continuously
    /// to the closed arc (useful at the right endpoint of a box).
    double eval_on(std::size_t electrode, double s) const;

    /// Integral of zeta over one electrode.
    double integral(std::size_t electrode) const;
    double total_integral() const;

    /// Knots of the piecewise-linear representation on one electrode,
    /// including both endpoints, and the values there.
    std::span<const double> knots(std::size_t electrode) const { return knots_.at(electrode); }
    std::span<const double> values(std::size_t electrode) const { return values_.at(electrode); }

    /// All knots of all electrodes in increasing order.
    std::span<const double> breakpoints() const { return breakpoints_; }

    /// d zeta / d height_m at arclength s on electrode m (1 for a box,
    /// twice the unit tent for a hat). Custom profiles have no parameters.
    double shape(std::size_t electrode, double s) const;

    /// Same kind and layout with new heights.
    ConductanceProfile with_heights(std::vector<double> heights) const;
    /// All values multiplied by c > 0.
    ConductanceProfile scaled(double c) const;

    friend ConductanceProfile make_profile(const ElectrodeLayout&, ProfileKind, std::vector<double>);
    friend ConductanceProfile make_custom_profile(const ElectrodeLayout&,
                                                  std::vector<std::vector<double>>,
                                                  std::vector<std::vector<double>>);

private:
    ConductanceProfile(ProfileKind kind, ElectrodeLayout layout) : kind_(kind), layout_(std::move(layout)) {}
    void finalize();

    ProfileKind kind_;
    ElectrodeLayout layout_;
    std::vector<double> heights_;
    std::vector<std::vector<double>> knots_;
    std::vector<std::vector<double>> values_;
    std::vector<double> breakpoints_;
};

/// Box or hat profile with one strictly positive parameter per electrode.
ConductanceProfile make_profile(const ElectrodeLayout& layout, ProfileKind kind,
                                std::vector<double> heights);
ConductanceProfile make_profile(const ElectrodeLayout& layout, ProfileKind kind, double height);

/// Piecewise-linear profile from knots (strictly increasing, starting and
/// ending at the electrode endpoints) and nonnegative values. Whether each
/// electrode carries some conductance is checked when a system is assembled.
ConductanceProfile make_custom_profile(const ElectrodeLayout& layout,
                                       std::vector<std::vector<double>> knots,
                                       std::vector<std::vector<double>> values);

ConductanceDerivative arclength_derivative(const ConductanceProfile& profile);

}  // namespace scem
