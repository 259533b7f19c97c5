#include "rismimo/ris_core.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rismimo/csvio.hpp"

namespace rismimo {

PatternFn isotropic_pattern() {
    return [](double, double) { return 1.0; };
}

PatternFn cosine_pattern() {
    return [](double theta, double) { return std::clamp(std::cos(theta), 0.0, 1.0); };
}

void RisGeometry::validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("RisGeometry: rows and cols must be >= 1");
    if (cell_width <= 0.0 || cell_length <= 0.0)
        throw std::invalid_argument("RisGeometry: cell dimensions must be positive");
    if (carrier_freq <= 0.0) throw std::invalid_argument("RisGeometry: carrier_freq must be positive");
    if (cell_gain <= 0.0) throw std::invalid_argument("RisGeometry: cell_gain must be positive");
}

ReflectionCoefficient reflection_from_impedance(const LoadImpedance& z) {
    const cdouble den = z.z_load + z.z0;
    if (std::abs(den) == 0.0)
        throw std::domain_error("reflection_from_impedance: Z_load = -Z0 is degenerate");
    const cdouble gamma = (z.z_load - z.z0) / den;
    ReflectionCoefficient rc;
    rc.amplitude = std::abs(gamma);
    rc.phase = rc.amplitude == 0.0 ? 0.0 : wrap_phase(std::arg(gamma));
    return rc;
}

AmplitudePhaseProfile AmplitudePhaseProfile::ideal() { return AmplitudePhaseProfile{}; }

AmplitudePhaseProfile AmplitudePhaseProfile::triangular_3db() {
    return piecewise_linear({{0.0, 0.7}, {kPi, 1.0}, {kTwoPi, 0.7}});
}

AmplitudePhaseProfile AmplitudePhaseProfile::piecewise_linear(std::vector<Breakpoint> breakpoints) {
    if (breakpoints.size() < 2)
        throw std::invalid_argument("AmplitudePhaseProfile: need at least two breakpoints");
    constexpr double kEdgeTol = 1e-9;
    if (std::abs(breakpoints.front().first) > kEdgeTol ||
        std::abs(breakpoints.back().first - kTwoPi) > kEdgeTol)
        throw std::invalid_argument("AmplitudePhaseProfile: breakpoints must cover [0, 2*pi]");
    breakpoints.front().first = 0.0;
    breakpoints.back().first = kTwoPi;
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (breakpoints[i].second <= 0.0)
            throw std::invalid_argument("AmplitudePhaseProfile: amplitudes must be positive");
        if (i > 0 && breakpoints[i].first <= breakpoints[i - 1].first)
            throw std::invalid_argument("AmplitudePhaseProfile: phases must be strictly increasing");
    }
    AmplitudePhaseProfile p;
    p.breakpoints_ = std::move(breakpoints);
    return p;
}

double amplitude_at_phase(const AmplitudePhaseProfile& profile, double phi) {
    if (phi < 0.0 || phi > kTwoPi)
        throw std::domain_error("amplitude_at_phase: phase outside [0, 2*pi]");
    if (profile.is_ideal()) return 1.0;
    const auto& bp = profile.breakpoints();
    auto it = std::upper_bound(bp.begin(), bp.end(), phi,
                               [](double v, const auto& b) { return v < b.first; });
    if (it == bp.begin()) return bp.front().second;
    if (it == bp.end()) return bp.back().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (phi - lo.first) / (hi.first - lo.first);
    return lo.second + t * (hi.second - lo.second);
}

AmplitudePhaseProfile profile_from_csv(const std::string& path) {
    CsvReader reader(path);
    reader.expect_header({"phase_rad", "amplitude"});
    std::vector<AmplitudePhaseProfile::Breakpoint> bp;
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        if (row.size() != 2)
            throw std::invalid_argument("profile_from_csv: expected 2 columns in " + path);
        bp.emplace_back(std::stod(row[0]), std::stod(row[1]));
    }
    return AmplitudePhaseProfile::piecewise_linear(std::move(bp));
}

}  // namespace rismimo
