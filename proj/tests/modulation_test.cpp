#include "rismimo/modulation.hpp"

#include <bit>
#include <cstdio>

#include "rismimo/rng.hpp"
#include "test_util.hpp"

using namespace rismimo;

// ---------------------------------------------------------------------------
// Independent oracles. These evaluate the ramp symbol from its branch
// definition and integrate numerically; they share no code with the
// closed forms under test.
// ---------------------------------------------------------------------------

// Simpson integration of s(t)*exp(-j*l*2*pi*t) on each smooth piece of
// the shifted ramp (split at the wrap instant t0).
static cdouble oracle_ideal_harmonic(double t0_frac, double dphi, int l, int panels = 8192) {
    auto integrand = [&](double t, bool wrapped) {
        const double ph = wrapped ? dphi * (t + 1.0 - t0_frac) : dphi * (t - t0_frac);
        return std::polar(1.0, ph - l * kTwoPi * t);
    };
    auto simpson = [&](double a, double b, bool wrapped) {
        if (b - a < 1e-300) return cdouble{0.0, 0.0};
        const double h = (b - a) / panels;
        cdouble acc = integrand(a, wrapped) + integrand(b, wrapped);
        for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(a + i * h, wrapped);
        return acc * (h / 3.0);
    };
    return simpson(0.0, t0_frac, true) + simpson(t0_frac, 1.0, false);
}

// Exact per-segment integrals of the q-step staircase (t0 = 0): the
// explicit finite sum form of the staircase coefficient.
static cdouble oracle_discrete_harmonic(double dphi, int q, int l) {
    cdouble acc{0.0, 0.0};
    const cdouble jl2pi{0.0, l * kTwoPi};
    for (int p = 0; p < q; ++p) {
        const cdouble seg =
            std::polar(1.0, dphi * p / q) *
            (std::polar(1.0, -l * kTwoPi * p / q) - std::polar(1.0, -l * kTwoPi * (p + 1.0) / q)) /
            jl2pi;
        acc += seg;
    }
    return acc;
}

// Simpson integration of the amplitude-profile-scaled shifted ramp.
static cdouble oracle_profile_harmonic(const AmplitudePhaseProfile& profile, double t0_frac,
                                       double dphi, int l, int panels = 65536) {
    auto integrand = [&](double t, bool wrapped) {
        double ph = wrapped ? dphi * (t + 1.0 - t0_frac) : dphi * (t - t0_frac);
        ph = std::min(ph, kTwoPi);
        return amplitude_at_phase(profile, ph) * std::polar(1.0, ph - l * kTwoPi * t);
    };
    auto simpson = [&](double a, double b, bool wrapped) {
        if (b - a < 1e-300) return cdouble{0.0, 0.0};
        const double h = (b - a) / panels;
        cdouble acc = integrand(a, wrapped) + integrand(b, wrapped);
        for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(a + i * h, wrapped);
        return acc * (h / 3.0);
    };
    return simpson(0.0, t0_frac, true) + simpson(t0_frac, 1.0, false);
}

static SymbolParams ideal_params(double t0_frac, double dphi) {
    SymbolParams p;
    p.t0 = t0_frac;
    p.delta_phi = dphi;
    p.symbol_period = 1.0;
    return p;
}

static SymbolParams stepped_params(double t0_frac, double dphi, int q) {
    SymbolParams p = ideal_params(t0_frac, dphi);
    p.steps = q;
    return p;
}

// ---------------------------------------------------------------------------

static void test_ideal_waveform() {
    auto w = ideal_waveform(ideal_params(0.0, 0.0), 8);
    for (const auto& s : w.samples) CHECK_CNEAR(s, cdouble(1.0, 0.0), 1e-15);
    CHECK_NEAR(w.sample_period * static_cast<double>(w.samples.size()), 1.0, 1e-15);

    w = ideal_waveform(ideal_params(0.0, kTwoPi), 4);
    const double expect0[] = {0.0, kPi / 2, kPi, 1.5 * kPi};
    for (int i = 0; i < 4; ++i) {
        CHECK_NEAR(std::abs(w.samples[i]), 1.0, 1e-15);
        CHECK_PHASE_NEAR(std::arg(w.samples[i]), expect0[i], 1e-12);
    }

    w = ideal_waveform(ideal_params(0.5, kTwoPi), 4);
    const double expect1[] = {kPi, 1.5 * kPi, 0.0, kPi / 2};
    for (int i = 0; i < 4; ++i) CHECK_PHASE_NEAR(std::arg(w.samples[i]), expect1[i], 1e-12);

    CHECK_THROWS(ideal_waveform(ideal_params(0.0, kTwoPi), 1), std::invalid_argument);
    CHECK_THROWS(ideal_waveform(stepped_params(0.0, kTwoPi, 8), 8), std::invalid_argument);
}

static void test_harmonic_coefficient_anchors() {
    // delta_phi = 2*pi on the first harmonic: unit coefficient rotated by t0
    auto a = harmonic_coefficient(ideal_params(0.0, kTwoPi), 1);
    CHECK_NEAR(a.amplitude(), 1.0, 1e-15);
    CHECK_PHASE_NEAR(a.phase(), 0.0, 1e-12);

    a = harmonic_coefficient(ideal_params(0.375, kTwoPi), 1);
    CHECK_NEAR(a.amplitude(), 1.0, 1e-12);
    CHECK_PHASE_NEAR(a.phase(), 1.25 * kPi, 1e-12);

    // published 3-4 digit mapping values reproduce to 1e-2
    a = harmonic_coefficient(ideal_params(0.0123, 0.549 * kPi), 1);
    CHECK_NEAR(a.amplitude(), 1.0 / 3.0, 1e-2);
    CHECK_PHASE_NEAR(a.phase(), 1.25 * kPi, 1e-2);

    a = harmonic_coefficient(ideal_params(0.0962, 1.180 * kPi), 1);
    CHECK_NEAR(a.amplitude(), std::sqrt(5.0 / 9.0), 1e-2);
    CHECK_PHASE_NEAR(a.phase(), 1.5 * kPi - std::atan(1.0 / 3.0), 1e-2);

    // no DC content in a full sweep
    a = harmonic_coefficient(ideal_params(0.77, kTwoPi), 0);
    CHECK_NEAR(a.amplitude(), 0.0, 1e-15);
}

static void test_harmonic_vs_quadrature() {
    RandomStream rng(101);
    for (int i = 0; i < 2000; ++i) {
        const double t0 = rng.uniform01();
        const double dphi = rng.uniform01() * 2.0 * kTwoPi;
        const int l = static_cast<int>(rng.uniform01() * 7) - 3;
        const auto closed = harmonic_coefficient(ideal_params(t0, dphi), l);
        const cdouble numeric = oracle_ideal_harmonic(t0, dphi, l);
        CHECK_MSG(testutil::near(closed.amplitude(), std::abs(numeric), 1e-6), "magnitude mismatch");
        if (std::abs(numeric) > 1e-9)
            CHECK_MSG(testutil::phase_near(closed.phase(), std::arg(numeric), 1e-6), "phase mismatch");
    }
}

static void test_parseval_bound() {
    RandomStream rng(55);
    for (int i = 0; i < 50; ++i) {
        const auto p = ideal_params(rng.uniform01(), rng.uniform01() * kTwoPi * 2.0);
        double acc = 0.0;
        for (int l = -40; l <= 40; ++l) {
            const double m = harmonic_coefficient(p, l).amplitude();
            CHECK_MSG(m <= 1.0 + 1e-12, "harmonic above unit envelope");
            acc += m * m;
        }
        CHECK_MSG(acc <= 1.0 + 1e-9, "Parseval bound violated");
    }
}

static void test_time_delay_property() {
    RandomStream rng(7);
    for (int i = 0; i < 200; ++i) {
        const double t0 = rng.uniform01() * 0.5;
        const double delta = rng.uniform01() * 0.4;
        const double dphi = rng.uniform01() * kTwoPi * 2.0;
        const int l = 1 + static_cast<int>(rng.uniform01() * 3);
        const auto base = harmonic_coefficient(ideal_params(t0, dphi), l);
        const auto shifted = harmonic_coefficient(ideal_params(t0 + delta, dphi), l);
        CHECK_NEAR(shifted.amplitude(), base.amplitude(), 1e-12);
        if (base.amplitude() > 1e-9)
            CHECK(testutil::phase_near(shifted.phase(), base.phase() - l * kTwoPi * delta, 1e-9));
    }
}

static void test_discrete_waveform() {
    auto w = discrete_waveform(stepped_params(0.0, kTwoPi, 4));
    const double expect[] = {0.0, kPi / 2, kPi, 1.5 * kPi};
    CHECK(w.samples.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK_PHASE_NEAR(std::arg(w.samples[i]), expect[i], 1e-12);

    w = discrete_waveform(stepped_params(0.0, 1.234, 1));
    CHECK(w.samples.size() == 1);
    CHECK_CNEAR(w.samples[0], cdouble(1.0, 0.0), 1e-15);

    w = discrete_waveform(stepped_params(0.0, kPi, 8));
    for (int i = 0; i < 8; ++i) CHECK_PHASE_NEAR(std::arg(w.samples[i]), i * kPi / 8, 1e-12);

    // circular shift by a representable t0 rotates the staircase
    w = discrete_waveform(stepped_params(0.25, kTwoPi, 4));
    CHECK_PHASE_NEAR(std::arg(w.samples[0]), 1.5 * kPi, 1e-12);
    CHECK_PHASE_NEAR(std::arg(w.samples[1]), 0.0, 1e-12);

    CHECK_THROWS(discrete_waveform(stepped_params(0.1, kTwoPi, 4)), std::invalid_argument);
    CHECK_THROWS(discrete_waveform(ideal_params(0.0, kTwoPi)), std::invalid_argument);
}

static void test_discrete_harmonic() {
    // q = 8 full sweep: the staircase keeps 97.45% of the harmonic
    auto a = discrete_harmonic_coefficient(stepped_params(0.0, kTwoPi, 8), 1);
    CHECK_NEAR(a.amplitude(), 0.9745, 5e-4);
    CHECK_NEAR(a.amplitude(), sinc(kPi / 8), 1e-15);
    CHECK_PHASE_NEAR(a.phase(), -kPi / 8, 1e-12);

    a = discrete_harmonic_coefficient(stepped_params(0.0, kTwoPi, 4), 1);
    CHECK_NEAR(a.amplitude(), sinc(kPi / 4), 1e-15);
    CHECK_CNEAR(a.value, oracle_discrete_harmonic(kTwoPi, 4, 1), 1e-14);

    // fine discretization approaches the continuous coefficient; the
    // residual phase lag is delta_phi/(2q)
    a = discrete_harmonic_coefficient(stepped_params(0.0, kTwoPi, 1000000), 1);
    CHECK_NEAR(a.amplitude(), 1.0, 1e-6);
    CHECK_PHASE_NEAR(a.phase(), 0.0, 1e-5);

    CHECK_THROWS(discrete_harmonic_coefficient(stepped_params(0.0, kTwoPi, 8), 0), std::domain_error);
    CHECK_THROWS(discrete_harmonic_coefficient(ideal_params(0.0, kTwoPi), 1), std::invalid_argument);

    // closed form vs the explicit finite sum, all q in 2..64
    RandomStream rng(23);
    for (int q = 2; q <= 64; ++q) {
        for (int i = 0; i < 20; ++i) {
            const double dphi = rng.uniform01() * kTwoPi;
            int l = static_cast<int>(rng.uniform01() * 7) - 3;
            if (l == 0) l = 1;
            const auto closed = discrete_harmonic_coefficient(stepped_params(0.0, dphi, q), l);
            CHECK_CNEAR(closed.value, oracle_discrete_harmonic(dphi, q, l), 1e-12);
        }
        // the staircase pinned at delta_phi = 2*pi, including q | l aliasing
        const auto full = discrete_harmonic_coefficient(stepped_params(0.0, kTwoPi, q), q);
        CHECK_CNEAR(full.value, oracle_discrete_harmonic(kTwoPi, q, q), 1e-12);
    }

    // monotone convergence toward the ideal coefficient
    double prev = 0.0;
    for (int q : {2, 4, 8, 16, 32}) {
        const double m = discrete_harmonic_coefficient(stepped_params(0.0, kTwoPi, q), 1).amplitude();
        CHECK_MSG(m >= prev, "staircase amplitude not nondecreasing in q");
        prev = m;
    }
    CHECK_MSG(prev > 0.998, "q = 32 staircase should be near the ideal coefficient");

    // the generated staircase carries exactly the closed-form
    // coefficient, including rotated grid shifts, at any q
    RandomStream wrng(29);
    for (int i = 0; i < 300; ++i) {
        const int q = 2 + static_cast<int>(wrng.uniform01() * 63);
        const int k = static_cast<int>(wrng.uniform01() * q);
        const double dphi = wrng.uniform01() * kTwoPi;
        int l = static_cast<int>(wrng.uniform01() * 7) - 3;
        if (l == 0) l = 1;
        const auto params = stepped_params(static_cast<double>(k) / q, dphi, q);
        const auto wf = discrete_waveform(params);
        cdouble from_samples{0.0, 0.0};
        for (int p = 0; p < q; ++p)
            from_samples += wf.samples[p] *
                            (std::polar(1.0, -l * kTwoPi * p / q) -
                             std::polar(1.0, -l * kTwoPi * (p + 1.0) / q)) /
                            cdouble(0.0, l * kTwoPi);
        CHECK_CNEAR(from_samples, discrete_harmonic_coefficient(params, l).value, 1e-12);
    }
}

static void test_discretization_ratio() {
    const cdouble r8 = discretization_ratio(stepped_params(0.0, kTwoPi, 8), 1);
    CHECK_NEAR(std::abs(r8), 0.9745, 5e-4);
    CHECK_PHASE_NEAR(std::arg(r8), -kPi / 8, 1e-12);

    const cdouble rfine = discretization_ratio(stepped_params(0.0, 1.3 * kPi, 1000000), 1);
    CHECK_NEAR(std::abs(rfine), 1.0, 1e-6);
    CHECK_PHASE_NEAR(std::arg(rfine), 0.0, 1e-5);

    // ratio equals the quotient of the two coefficients
    RandomStream rng(17);
    for (int i = 0; i < 500; ++i) {
        const double t0 = rng.uniform01();
        const double dphi = 0.05 + rng.uniform01() * (kTwoPi - 0.1);
        const int q = 2 + static_cast<int>(rng.uniform01() * 60);
        int l = static_cast<int>(rng.uniform01() * 5) - 2;
        if (l == 0) l = 1;
        const auto params = stepped_params(t0, dphi, q);
        const cdouble ratio = discretization_ratio(params, l);
        const cdouble ideal = harmonic_coefficient(ideal_params(t0, dphi), l).value;
        if (std::abs(ideal) < 1e-6) continue;
        const cdouble disc = discrete_harmonic_coefficient(params, l).value;
        CHECK_CNEAR(ratio, disc / ideal, 1e-10);
    }

    // q = 10 cross-check of the published ring sweep
    const cdouble r10 = discretization_ratio(stepped_params(0.0, 1.180 * kPi, 10), 1);
    const cdouble quotient = discrete_harmonic_coefficient(stepped_params(0.0, 1.180 * kPi, 10), 1).value /
                             harmonic_coefficient(ideal_params(0.0, 1.180 * kPi), 1).value;
    CHECK_CNEAR(r10, quotient, 1e-12);

    CHECK_THROWS(discretization_ratio(stepped_params(0.0, 0.0, 8), 1), std::domain_error);
    CHECK_THROWS(discretization_ratio(stepped_params(0.0, kTwoPi, 8), 0), std::domain_error);
}

static void test_qam16_table() {
    const auto& table = qam16_table();

    struct Anchor {
        int sym;
        double amp, phase, t0, dphi;
    };
    const double at = std::atan(1.0 / 3.0);
    const double mid = std::sqrt(5.0 / 9.0);
    const Anchor anchors[] = {
        {0, 1.0, 1.25 * kPi, 0.375, 2.0 * kPi},
        {1, mid, 1.5 * kPi - at, 0.0962, 1.180 * kPi},
        {2, 1.0, 1.75 * kPi, 0.125, 2.0 * kPi},
        {3, mid, 1.5 * kPi + at, 0.994, 1.180 * kPi},
        {4, mid, kPi + at, 0.244, 1.180 * kPi},
        {5, 1.0 / 3.0, 1.25 * kPi, 0.0123, 0.549 * kPi},
        {6, mid, kTwoPi - at, 0.846, 1.180 * kPi},
        {7, 1.0 / 3.0, 1.75 * kPi, 0.762, 0.549 * kPi},
        {8, 1.0, 0.75 * kPi, 0.625, 2.0 * kPi},
        {9, mid, 0.5 * kPi + at, 0.494, 1.180 * kPi},
        {10, 1.0, 0.25 * kPi, 0.875, 2.0 * kPi},
        {11, mid, 0.5 * kPi - at, 0.596, 1.180 * kPi},
        {12, mid, kPi - at, 0.346, 1.180 * kPi},
        {13, 1.0 / 3.0, 0.75 * kPi, 0.262, 0.549 * kPi},
        {14, mid, at, 0.744, 1.180 * kPi},
        {15, 1.0 / 3.0, 0.25 * kPi, 0.512, 0.549 * kPi},
    };
    for (const auto& a : anchors) {
        const auto& e = table[a.sym];
        CHECK(e.symbol_index == a.sym);
        CHECK(e.bits == a.sym);
        CHECK_NEAR(e.amplitude, a.amp, 1e-12);
        CHECK_PHASE_NEAR(e.phase, a.phase, 1e-12);
        CHECK_NEAR(e.t0_frac, a.t0, 5e-4);
        CHECK_NEAR(e.delta_phi, a.dphi, 2e-3);  // published values carry 4 digits
        // the stored params reproduce the stored targets
        const auto h = harmonic_coefficient(ideal_params(e.t0_frac, e.delta_phi), 1);
        CHECK_NEAR(h.amplitude(), e.amplitude, 1e-12);
        CHECK_PHASE_NEAR(h.phase(), e.phase, 1e-9);
    }
    CHECK_NEAR(qam16_mean_energy(), 5.0 / 9.0, 1e-12);

    // Gray property: neighbors on the grid differ in exactly one bit
    auto grid = [&](int sym) {
        const cdouble pt = table[sym].point * (3.0 * std::sqrt(2.0));
        return std::make_pair(static_cast<int>(std::lround(pt.real())),
                              static_cast<int>(std::lround(pt.imag())));
    };
    for (int a = 0; a < 16; ++a) {
        for (int b = 0; b < 16; ++b) {
            const auto [ia, qa] = grid(a);
            const auto [ib, qb] = grid(b);
            const bool adjacent = (ia == ib && std::abs(qa - qb) == 2) ||
                                  (qa == qb && std::abs(ia - ib) == 2);
            if (adjacent) CHECK_MSG(std::popcount(static_cast<unsigned>(a ^ b)) == 1, "not Gray coded");
        }
    }

    const auto& e2 = map_bits_16qam(0b0010);
    CHECK_NEAR(e2.amplitude, 1.0, 1e-12);
    CHECK_PHASE_NEAR(e2.phase, 1.75 * kPi, 1e-12);
    CHECK_NEAR(e2.t0_frac, 0.125, 1e-12);
    CHECK_NEAR(e2.delta_phi, kTwoPi, 1e-12);

    const auto& e15 = map_bits_16qam(0b1111);
    CHECK_NEAR(e15.amplitude, 1.0 / 3.0, 1e-12);
    CHECK_PHASE_NEAR(e15.phase, 0.25 * kPi, 1e-12);
    CHECK_NEAR(e15.t0_frac, 0.512, 5e-4);
    CHECK_NEAR(e15.delta_phi, 0.549 * kPi, 2e-3);

    const auto& e8 = map_bits_16qam(0b1000);
    CHECK_NEAR(e8.amplitude, 1.0, 1e-12);
    CHECK_PHASE_NEAR(e8.phase, 0.75 * kPi, 1e-12);
    CHECK_NEAR(e8.t0_frac, 0.625, 1e-12);

    CHECK_THROWS(map_bits_16qam(16), std::invalid_argument);
}

static void test_demap() {
    const auto& table = qam16_table();
    CHECK(demap_symbol(std::polar(1.0, 1.25 * kPi), table) == 0b0000);
    // equidistant tie between the four inner points: lowest index wins
    CHECK(demap_symbol(cdouble(0.0, 0.0), table) == 0b0101);
    const cdouble p10 = table[10].point + cdouble(0.05, 0.05);
    CHECK(demap_symbol(p10, table) == 0b1010);

    // exhaustive nearest-point scan agrees for random probes
    RandomStream rng(3);
    for (int i = 0; i < 500; ++i) {
        const cdouble raw(rng.uniform01() * 2.4 - 1.2, rng.uniform01() * 2.4 - 1.2);
        int best = 0;
        double best_d = 1e300;
        for (int s = 0; s < 16; ++s) {
            const double d = std::norm(raw - table[s].point);
            if (d < best_d) {
                best_d = d;
                best = s;
            }
        }
        CHECK(demap_symbol(raw, table) == best);
    }
}

static void test_round_trip() {
    const auto& table = qam16_table();
    for (int b = 0; b < 16; ++b) {
        const auto& e = table[b];
        const auto ideal = harmonic_coefficient(ideal_params(e.t0_frac, e.delta_phi), 1);
        CHECK(demap_symbol(ideal.value, table) == b);
        const auto stepped = discrete_harmonic_coefficient(stepped_params(e.t0_frac, e.delta_phi, 40), 1);
        CHECK(demap_symbol(stepped.value, table) == b);
    }
}

static void test_solve_mapping() {
    const auto ideal = AmplitudePhaseProfile::ideal();
    auto p = solve_mapping(ideal, 1.0, 1.25 * kPi, 1);
    CHECK_NEAR(p.t0, 0.375, 1e-9);
    CHECK_NEAR(p.delta_phi, kTwoPi, 1e-9);

    const auto tri = AmplitudePhaseProfile::triangular_3db();
    CHECK_NEAR(max_harmonic_amplitude(tri, 1), 0.85, 1e-9);

    p = solve_mapping(tri, 0.85, 1.25 * kPi, 1);
    CHECK_NEAR(p.delta_phi, kTwoPi, 1e-9);
    auto check_against_oracle = [&](const SymbolParams& sp, double amp, double phase) {
        const cdouble v = oracle_profile_harmonic(tri, sp.t0_frac(), sp.delta_phi, 1);
        CHECK_NEAR(std::abs(v), amp, 1e-4);
        CHECK(testutil::phase_near(std::arg(v), phase, 1e-4));
    };
    check_against_oracle(p, 0.85, 1.25 * kPi);

    p = solve_mapping(tri, 0.85 / 3.0, 1.25 * kPi, 1);
    check_against_oracle(p, 0.85 / 3.0, 1.25 * kPi);

    p = solve_mapping(tri, 0.85 * std::sqrt(5.0 / 9.0), 0.5 * kPi - std::atan(1.0 / 3.0), 1);
    check_against_oracle(p, 0.85 * std::sqrt(5.0 / 9.0), 0.5 * kPi - std::atan(1.0 / 3.0));

    CHECK_THROWS(solve_mapping(tri, 0.9, 0.0, 1), std::domain_error);
    CHECK_THROWS(solve_mapping(tri, -0.1, 0.0, 1), std::domain_error);
}

static void test_constellation_csv() {
    const std::string path = "constellation_tmp.csv";
    write_constellation_csv(path, qam16_table(), 42);
    const auto loaded = read_constellation_csv(path);
    for (int i = 0; i < 16; ++i) {
        CHECK(loaded[i].bits == qam16_table()[i].bits);
        CHECK_NEAR(loaded[i].amplitude, qam16_table()[i].amplitude, 1e-9);
        CHECK_NEAR(loaded[i].phase, qam16_table()[i].phase, 1e-9);
        CHECK_NEAR(loaded[i].t0_frac, qam16_table()[i].t0_frac, 1e-9);
        CHECK_NEAR(loaded[i].delta_phi, qam16_table()[i].delta_phi, 1e-9);
    }
    std::remove(path.c_str());
}

int main() {
    test_ideal_waveform();
    test_harmonic_coefficient_anchors();
    test_harmonic_vs_quadrature();
    test_parseval_bound();
    test_time_delay_property();
    test_discrete_waveform();
    test_discrete_harmonic();
    test_discretization_ratio();
    test_qam16_table();
    test_demap();
    test_round_trip();
    test_solve_mapping();
    test_constellation_csv();
    return testutil::summarize("modulation_test");
}
