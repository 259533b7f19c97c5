#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rismimo/mathutil.hpp"
#include "rismimo/ris_core.hpp"

namespace rismimo {

// One constant-envelope baseband symbol: a phase ramp of total sweep
// delta_phi over the symbol period, circularly shifted by t0. steps is
// the number of discrete phase segments the hardware can realize per
// symbol; nullopt means a continuous ramp.
struct SymbolParams {
    double t0 = 0.0;            // seconds, in [0, Ts)
    double delta_phi = 0.0;     // radians, >= 0
    double symbol_period = 1.0; // Ts, seconds
    std::optional<int> steps;   // q; nullopt = unbounded

    double t0_frac() const { return t0 / symbol_period; }
    void validate() const;
};

struct HarmonicCoefficient {
    int order = 0;
    cdouble value{0.0, 0.0};

    double amplitude() const { return std::abs(value); }
    double phase() const { return amplitude() == 0.0 ? 0.0 : wrap_phase(std::arg(value)); }
};

struct Waveform {
    std::vector<cdouble> samples;
    double sample_period = 0.0;
};

// Point samples of the continuous ramp symbol at t = i*Ts/n.
// Requires unbounded steps and n >= 2.
Waveform ideal_waveform(const SymbolParams& params, int samples_per_symbol);

// Closed-form Fourier-series coefficient a_l of the continuous ramp
// symbol: |a_l| = |sinc(delta_phi/2 - l*pi)|, phase per the harmonic
// phase formula with mathematical modulo and step(0) = 0. Requires
// unbounded steps.
HarmonicCoefficient harmonic_coefficient(const SymbolParams& params, int order);

// Staircase of q constant segments, segment p holding exp(j*dphi*p/q),
// circularly rotated when t0 is an integer multiple of Ts/q. Throws
// std::invalid_argument for shifts not representable on that grid.
Waveform discrete_waveform(const SymbolParams& params);

// Closed-form coefficient of the q-step staircase symbol. The circular
// shift t0 enters through the exact rotation exp(-j*l*2*pi*t0/Ts) and
// is not restricted to the staircase grid. Requires finite steps and
// order != 0.
HarmonicCoefficient discrete_harmonic_coefficient(const SymbolParams& params, int order);

// a~_l / a_l, the multiplicative distortion of the q-step staircase
// relative to the continuous ramp. Throws std::domain_error where the
// continuous coefficient vanishes.
cdouble discretization_ratio(const SymbolParams& params, int order);

// One row of the 16-QAM mapping on the 1st-order harmonic. Values are
// recomputed at full precision; the published 3-4 digit table values
// serve as test anchors.
struct QamMapEntry {
    int symbol_index = 0;
    std::uint8_t bits = 0;       // 4 source bits, MSB first
    double amplitude = 0.0;      // |a_1| target
    double phase = 0.0;          // angle(a_1) target, [0, 2*pi)
    double t0_frac = 0.0;        // t0 / Ts
    double delta_phi = 0.0;      // radians
    cdouble point{0.0, 0.0};     // cartesian target, amplitude*exp(j*phase)
};

using Qam16Table = std::array<QamMapEntry, 16>;

const Qam16Table& qam16_table();

// Mean of |point|^2 over the 16 entries (5/9 for this table).
double qam16_mean_energy();

// bits must fit in 4 bits; returns the matching table row.
const QamMapEntry& map_bits_16qam(std::uint8_t bits);

// Nearest ideal point by Euclidean distance, ties broken by lowest
// symbol_index. Returns the 4 source bits.
std::uint8_t demap_symbol(cdouble raw, const Qam16Table& constellation);

// Harmonic coefficient of the amplitude-profile-scaled ramp symbol, by
// composite Simpson integration (panels per smooth piece, split at the
// wrap instant t0). The profile is evaluated at the instantaneous
// commanded phase; delta_phi is limited to [0, 2*pi].
cdouble harmonic_by_quadrature(const AmplitudePhaseProfile& profile, double delta_phi,
                               double t0_frac, int order, int panels = 8192);

// The solver's amplitude budget: |a_l| of the full sweep
// delta_phi = 2*pi under the profile.
double max_harmonic_amplitude(const AmplitudePhaseProfile& profile, int order);

// Finds (t0, delta_phi) reproducing (target_amp, target_phase) on the
// requested harmonic under the given amplitude profile: bisection on
// |a_l(delta_phi)| over (0, 2*pi], then t0 from the time-delay
// property. Throws std::domain_error for unreachable amplitudes and
// std::runtime_error if the root finder fails to converge.
SymbolParams solve_mapping(const AmplitudePhaseProfile& profile, double target_amp,
                           double target_phase, int order);

// Constellation table serialization:
// symbol_index,bits,amp,phase_rad,t0_frac,delta_phi_rad
void write_constellation_csv(const std::string& path, const Qam16Table& table,
                             std::uint64_t seed);
Qam16Table read_constellation_csv(const std::string& path);

}  // namespace rismimo
