#include "rismimo/modulation.hpp"

#include <algorithm>
#include <bitset>
#include <limits>

#include "rismimo/csvio.hpp"

namespace rismimo {

void SymbolParams::validate() const {
    if (symbol_period <= 0.0) throw std::invalid_argument("SymbolParams: symbol_period must be positive");
    if (t0 < 0.0 || t0 >= symbol_period)
        throw std::invalid_argument("SymbolParams: t0 must lie in [0, Ts)");
    if (delta_phi < 0.0) throw std::invalid_argument("SymbolParams: delta_phi must be non-negative");
    if (steps && *steps < 1) throw std::invalid_argument("SymbolParams: steps must be >= 1");
}

Waveform ideal_waveform(const SymbolParams& params, int samples_per_symbol) {
    params.validate();
    if (params.steps) throw std::invalid_argument("ideal_waveform: params must have unbounded steps");
    if (samples_per_symbol < 2) throw std::invalid_argument("ideal_waveform: need >= 2 samples");
    const double ts = params.symbol_period;
    Waveform w;
    w.sample_period = ts / samples_per_symbol;
    w.samples.reserve(samples_per_symbol);
    for (int i = 0; i < samples_per_symbol; ++i) {
        const double t = i * w.sample_period;
        const double arg = t <= params.t0 ? params.delta_phi * (t + ts - params.t0) / ts
                                          : params.delta_phi * (t - params.t0) / ts;
        w.samples.push_back(std::polar(1.0, arg));
    }
    return w;
}

HarmonicCoefficient harmonic_coefficient(const SymbolParams& params, int order) {
    params.validate();
    if (params.steps) throw std::invalid_argument("harmonic_coefficient: params must have unbounded steps");
    const double tau = params.t0_frac();
    const double shift = -order * kTwoPi * tau;
    const double u = 0.5 * params.delta_phi - order * kPi;
    if (u == 0.0) {
        // delta_phi = 2*l*pi: the ramp is the pure l-th harmonic.
        return {order, std::polar(1.0, wrap_phase(shift))};
    }
    const double mag = std::abs(sinc(u));
    const long parity = math_mod(static_cast<long>(std::floor(params.delta_phi / kTwoPi - order)), 2L);
    const double phase = shift + u + parity * kPi + unit_step(kTwoPi * order - params.delta_phi) * kPi;
    return {order, std::polar(mag, wrap_phase(phase))};
}

Waveform discrete_waveform(const SymbolParams& params) {
    params.validate();
    if (!params.steps) throw std::invalid_argument("discrete_waveform: params must have finite steps");
    const int q = *params.steps;
    const double pos = params.t0_frac() * q;
    const long k = std::lround(pos);
    if (std::abs(pos - k) > 1e-9)
        throw std::invalid_argument("discrete_waveform: t0 is not a multiple of Ts/q");
    Waveform w;
    w.sample_period = params.symbol_period / q;
    w.samples.reserve(q);
    for (int p = 0; p < q; ++p) {
        const long rotated = math_mod(static_cast<long>(p) - k, static_cast<long>(q));
        w.samples.push_back(std::polar(1.0, params.delta_phi * rotated / q));
    }
    return w;
}

HarmonicCoefficient discrete_harmonic_coefficient(const SymbolParams& params, int order) {
    params.validate();
    if (!params.steps)
        throw std::invalid_argument("discrete_harmonic_coefficient: params must have finite steps");
    if (order == 0)
        throw std::domain_error("discrete_harmonic_coefficient: order 0 is unsupported");
    const int q = *params.steps;
    const double u = 0.5 * params.delta_phi - order * kPi;
    const double mag_signed = sinc(order * kPi / q) * sinc_ratio(u, q);
    const double phase = u - params.delta_phi / (2.0 * q) - order * kTwoPi * params.t0_frac();
    return {order, mag_signed * std::polar(1.0, phase)};
}

cdouble discretization_ratio(const SymbolParams& params, int order) {
    params.validate();
    if (!params.steps)
        throw std::invalid_argument("discretization_ratio: params must have finite steps");
    if (order == 0) throw std::domain_error("discretization_ratio: order 0 is unsupported");
    const int q = *params.steps;
    const double u = 0.5 * params.delta_phi - order * kPi;
    if (u != 0.0 && std::abs(std::sin(u)) <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(u))
        throw std::domain_error("discretization_ratio: continuous coefficient vanishes here");
    const double den = sinc(u / q);
    if (den == 0.0)
        throw std::domain_error("discretization_ratio: continuous coefficient vanishes here");
    return (sinc(order * kPi / q) / den) * std::polar(1.0, -params.delta_phi / (2.0 * q));
}

namespace {

// Solves sinc(u) = target on u in (-pi, 0], where sinc is increasing
// from 0 to 1.
double invert_sinc(double target) {
    if (target >= 1.0) return 0.0;
    double lo = -kPi, hi = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (sinc(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Qam16Table build_qam16_table() {
    // I-rail levels indexed by the 2 source bits, Gray coded.
    auto level = [](int two_bits) {
        switch (two_bits) {
            case 0b00: return -3.0;
            case 0b01: return -1.0;
            case 0b11: return 1.0;
            default: return 3.0;  // 0b10
        }
    };
    const double scale = 1.0 / (3.0 * std::sqrt(2.0));
    Qam16Table table;
    for (int i = 0; i < 16; ++i) {
        QamMapEntry e;
        e.symbol_index = i;
        e.bits = static_cast<std::uint8_t>(i);
        const double q_level = level(i >> 2);   // bits b3 b2
        const double i_level = level(i & 0b11); // bits b1 b0
        e.point = cdouble(i_level            * scale, q_level * scale);
        // sqrt(18/18) = 1 exactly for the corners, so the full-sweep
        // ring solves to delta_phi = 2*pi with no bisection residue
        e.amplitude = std::sqrt((i_level * i_level + q_level * q_level) / 18.0);
        e.phase = wrap_phase(std::atan2(q_level, i_level));
        const double u = invert_sinc(e.amplitude);
        e.delta_phi = kTwoPi + 2.0 * u;
        e.t0_frac = wrap_phase(u - e.phase) / kTwoPi;
        table[i] = e;
    }
    return table;
}

}  // namespace

const Qam16Table& qam16_table() {
    static const Qam16Table table = build_qam16_table();
    return table;
}

double qam16_mean_energy() {
    double acc = 0.0;
    for (const auto& e : qam16_table()) acc += e.amplitude * e.amplitude;
    return acc / 16.0;
}

const QamMapEntry& map_bits_16qam(std::uint8_t bits) {
    if (bits > 0x0f) throw std::invalid_argument("map_bits_16qam: expected 4 bits");
    return qam16_table()[bits];
}

std::uint8_t demap_symbol(cdouble raw, const Qam16Table& constellation) {
    double best = std::numeric_limits<double>::infinity();
    std::uint8_t bits = 0;
    for (const auto& e : constellation) {
        const double d = std::norm(raw - e.point);
        if (d < best) {
            best = d;
            bits = e.bits;
        }
    }
    return bits;
}

cdouble harmonic_by_quadrature(const AmplitudePhaseProfile& profile, double delta_phi,
                               double t0_frac, int order, int panels) {
    if (panels < 2) throw std::invalid_argument("harmonic_by_quadrature: need >= 2 panels");
    if (delta_phi < 0.0 || delta_phi > kTwoPi + 1e-12)
        throw std::domain_error("harmonic_by_quadrature: delta_phi outside [0, 2*pi]");
    // s(tau) = A(phi(tau)) * exp(j*phi(tau)), phi the t0-shifted ramp;
    // coefficient = integral of s(tau) * exp(-j*l*2*pi*tau) over [0, 1].
    // The ramp wraps at t0, so each smooth piece is integrated on its
    // own; Simpson across the jump would limit the accuracy to O(h).
    auto integrand = [&](double tau, bool wrapped) {
        double arg = wrapped ? delta_phi * (tau + 1.0 - t0_frac) : delta_phi * (tau - t0_frac);
        arg = std::clamp(arg, 0.0, kTwoPi);
        return amplitude_at_phase(profile, arg) * std::polar(1.0, arg - order * kTwoPi * tau);
    };
    auto simpson = [&](double a, double b, bool wrapped) {
        if (b - a <= 0.0) return cdouble{0.0, 0.0};
        const double h = (b - a) / panels;
        cdouble acc = integrand(a, wrapped) + integrand(b, wrapped);
        for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(a + i * h, wrapped);
        return acc * (h / 3.0);
    };
    return simpson(0.0, t0_frac, true) + simpson(t0_frac, 1.0, false);
}

double max_harmonic_amplitude(const AmplitudePhaseProfile& profile, int order) {
    return std::abs(harmonic_by_quadrature(profile, kTwoPi, 0.0, order));
}

SymbolParams solve_mapping(const AmplitudePhaseProfile& profile, double target_amp,
                           double target_phase, int order) {
    if (order < 1) throw std::invalid_argument("solve_mapping: order must be >= 1");
    if (target_amp <= 0.0) throw std::domain_error("solve_mapping: target amplitude must be positive");
    const double amp_max = max_harmonic_amplitude(profile, order);
    if (target_amp > amp_max + 1e-12)
        throw std::domain_error("solve_mapping: target amplitude unreachable under this profile");

    auto amp_at = [&](double dphi) { return std::abs(harmonic_by_quadrature(profile, dphi, 0.0, order)); };

    double dphi = kTwoPi;
    if (target_amp < amp_max) {
        double lo = 1e-6, hi = kTwoPi;
        if (amp_at(lo) > target_amp)
            throw std::runtime_error("solve_mapping: bracket validation failed");
        bool converged = false;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (amp_at(mid) < target_amp ? lo : hi) = mid;
            if (hi - lo < 1e-13) {
                converged = true;
                break;
            }
        }
        if (!converged) throw std::runtime_error("solve_mapping: root finder did not converge");
        dphi = 0.5 * (lo + hi);
    }

    const double phase0 = std::arg(harmonic_by_quadrature(profile, dphi, 0.0, order));
    const double t0_frac = wrap_phase(phase0 - target_phase) / (kTwoPi * order);

    const cdouble achieved = harmonic_by_quadrature(profile, dphi, t0_frac, order);
    if (std::abs(std::abs(achieved) - target_amp) > 1e-4 ||
        phase_distance(std::arg(achieved), target_phase) > 1e-4)
        throw std::runtime_error("solve_mapping: solution residual exceeds tolerance");

    SymbolParams p;
    p.t0 = t0_frac;
    p.delta_phi = dphi;
    p.symbol_period = 1.0;
    return p;
}

namespace {

std::string bits_to_string(std::uint8_t bits) {
    return std::bitset<4>(bits).to_string();
}

std::uint8_t bits_from_string(const std::string& s) {
    if (s.size() != 4) throw std::invalid_argument("constellation csv: bits field must be 4 chars");
    return static_cast<std::uint8_t>(std::bitset<4>(s).to_ulong());
}

}  // namespace

void write_constellation_csv(const std::string& path, const Qam16Table& table,
                             std::uint64_t seed) {
    CsvWriter w(path, {"symbol_index", "bits", "amp", "phase_rad", "t0_frac", "delta_phi_rad"});
    for (const auto& e : table) {
        w.write_row({CsvWriter::fmt_int(e.symbol_index), bits_to_string(e.bits),
                     CsvWriter::fmt(e.amplitude), CsvWriter::fmt(e.phase),
                     CsvWriter::fmt(e.t0_frac), CsvWriter::fmt(e.delta_phi)});
    }
    w.finish(seed);
}

Qam16Table read_constellation_csv(const std::string& path) {
    CsvReader r(path);
    std::vector<std::string> row;
    if (!r.next_row(row) || row.size() < 6 || row[0] != "symbol_index")
        throw std::invalid_argument("constellation csv: bad header in " + path);
    Qam16Table table;
    std::array<bool, 16> seen{};
    while (r.next_row(row)) {
        if (row.size() < 6) throw std::invalid_argument("constellation csv: short row in " + path);
        QamMapEntry e;
        e.symbol_index = std::stoi(row[0]);
        if (e.symbol_index < 0 || e.symbol_index > 15)
            throw std::invalid_argument("constellation csv: symbol_index out of range");
        e.bits = bits_from_string(row[1]);
        e.amplitude = std::stod(row[2]);
        e.phase = std::stod(row[3]);
        e.t0_frac = std::stod(row[4]);
        e.delta_phi = std::stod(row[5]);
        e.point = std::polar(e.amplitude, e.phase);
        table[e.symbol_index] = e;
        seen[e.symbol_index] = true;
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        throw std::invalid_argument("constellation csv: missing entries in " + path);
    return table;
}

}  // namespace rismimo
