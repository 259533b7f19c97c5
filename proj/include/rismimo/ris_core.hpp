#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rismimo/mathutil.hpp"

namespace rismimo {

// Normalized power radiation pattern F(theta, phi) in [0, 1], F(0, .) = 1.
using PatternFn = std::function<double(double, double)>;

PatternFn isotropic_pattern();
// cos(theta) clipped to [0, 1], the conventional element pattern.
PatternFn cosine_pattern();

// Physical layout and radiation parameters of the reflecting surface.
struct RisGeometry {
    int rows = 1;             // N
    int cols = 1;             // M
    double cell_width = 0.0;  // d_x, meters
    double cell_length = 0.0; // d_y, meters
    double cell_gain = 1.0;   // G, linear
    double carrier_freq = 0.0;
    PatternFn pattern = isotropic_pattern();

    double wavelength() const { return kSpeedOfLight / carrier_freq; }

    // Throws std::invalid_argument on nonsensical dimensions.
    void validate() const;
};

// Complex reflection value Gamma = A * exp(j*phase) of one unit cell.
// Phases are kept in [0, 2*pi).
struct ReflectionCoefficient {
    double amplitude = 0.0;  // |Gamma| <= 1 for passive cells
    double phase = 0.0;

    cdouble value() const { return std::polar(amplitude, phase); }
};

struct LoadImpedance {
    cdouble z_load{0.0, 0.0};  // ohms
    double z0 = 377.0;         // characteristic impedance of air, ohms
};

// Gamma = (Z - Z0) / (Z + Z0), amplitude and full-quadrant phase.
// Throws std::domain_error for the degenerate load Z = -Z0.
ReflectionCoefficient reflection_from_impedance(const LoadImpedance& z);

// Reflection amplitude as a function of the commanded phase. Models
// the amplitude/phase coupling of real unit cells; Ideal means
// A(phi) == 1 everywhere.
class AmplitudePhaseProfile {
public:
    // (phase, amplitude) breakpoints, strictly increasing in phase,
    // covering [0, 2*pi], all amplitudes > 0.
    using Breakpoint = std::pair<double, double>;

    static AmplitudePhaseProfile ideal();

    // Triangular profile with 3 dB fluctuation: 0.7 at phase 0,
    // rising linearly to 1.0 at pi, back down to 0.7 at 2*pi.
    static AmplitudePhaseProfile triangular_3db();

    static AmplitudePhaseProfile piecewise_linear(std::vector<Breakpoint> breakpoints);

    bool is_ideal() const { return breakpoints_.empty(); }
    const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }

private:
    AmplitudePhaseProfile() = default;
    std::vector<Breakpoint> breakpoints_;  // empty <=> ideal
};

// Linear interpolation between breakpoints. phi must lie in [0, 2*pi]
// (callers reduce modulo 2*pi first); throws std::domain_error otherwise.
double amplitude_at_phase(const AmplitudePhaseProfile& profile, double phi);

// Parses a `phase_rad,amplitude` CSV (header required, rows ascending
// in phase) into a piecewise-linear profile.
AmplitudePhaseProfile profile_from_csv(const std::string& path);

}  // namespace rismimo
