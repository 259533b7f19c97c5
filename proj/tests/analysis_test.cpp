#include "rismimo/analysis.hpp"

#include <cstdio>

#include "rismimo/rng.hpp"
#include "test_util.hpp"

using namespace rismimo;

// erfc by Simpson quadrature of its defining integral, truncated where
// exp(-u^2) underflows. Independent of the library's erfc route.
static double erfc_by_quadrature(double x) {
    const double hi = std::max(x, 0.0) + 28.0;
    const int panels = 200000;
    const double h = (hi - x) / panels;
    auto f = [](double u) { return std::exp(-u * u); };
    double acc = f(x) + f(hi);
    for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(x + i * h);
    return 2.0 / std::sqrt(kPi) * acc * h / 3.0;
}

static Mat2 identity2() { return Mat2{1.0, 0.0, 0.0, 1.0}; }

static void test_zf_snr() {
    auto snr = zf_snr(identity2(), 2.0, 0.5);
    CHECK_NEAR(snr.snr1, 4.0, 1e-12);
    CHECK_NEAR(snr.snr2, 4.0, 1e-12);

    snr = zf_snr(Mat2{2.0, 0.0, 0.0, 1.0}, 1.0, 1.0);
    CHECK_NEAR(snr.snr1, 4.0, 1e-12);
    CHECK_NEAR(snr.snr2, 1.0, 1e-12);

    // homogeneity: scaling h by complex c scales both SNRs by |c|^2
    RandomStream rng(21);
    for (int i = 0; i < 100; ++i) {
        const Mat2 h{rng.complex_normal(1.0), rng.complex_normal(1.0), rng.complex_normal(1.0),
                     rng.complex_normal(1.0)};
        if (std::abs(h.det()) < 0.05) continue;
        const cdouble c = rng.complex_normal(1.0);
        if (std::abs(c) < 0.05) continue;
        const auto base = zf_snr(h, 1.3, 0.7);
        const auto scaled = zf_snr(h * c, 1.3, 0.7);
        CHECK(testutil::near_rel(scaled.snr1, base.snr1 * std::norm(c), 1e-12));
        CHECK(testutil::near_rel(scaled.snr2, base.snr2 * std::norm(c), 1e-12));

        // re-phasing one row leaves both SNRs unchanged
        const cdouble ph = std::polar(1.0, rng.uniform01() * kTwoPi);
        const Mat2 rephased{h.a11 * ph, h.a12 * ph, h.a21, h.a22};
        const auto snr_re = zf_snr(rephased, 1.3, 0.7);
        CHECK(testutil::near_rel(snr_re.snr1, base.snr1, 1e-12));
        CHECK(testutil::near_rel(snr_re.snr2, base.snr2, 1e-12));
    }

    CHECK_THROWS(zf_snr(Mat2{1.0, 1.0, 1.0, 1.0}, 1.0, 1.0), std::domain_error);
}

static void test_snr_from_rx1() {
    auto snr = snr_from_rx1(7.5, identity2());
    CHECK_NEAR(snr.snr1, 7.5, 1e-12);
    CHECK_NEAR(snr.snr2, 7.5, 1e-12);

    snr = snr_from_rx1(10.0, Mat2{1.0, 0.0, 0.0, 2.0});
    CHECK_NEAR(snr.snr1, 10.0, 1e-12);
    CHECK_NEAR(snr.snr2, 40.0, 1e-12);

    // algebraic identity with the direct ZF expression
    RandomStream rng(33);
    for (int i = 0; i < 200; ++i) {
        const Mat2 h{rng.complex_normal(1.0), rng.complex_normal(1.0), rng.complex_normal(1.0),
                     rng.complex_normal(1.0)};
        if (std::abs(h.det()) < 0.05) continue;
        const double p = 0.1 + rng.uniform01() * 3.0;
        const double s2 = 0.01 + rng.uniform01();
        const double rx1 = p * (std::norm(h.a11) + std::norm(h.a12)) / s2;
        const auto via_rx1 = snr_from_rx1(rx1, h);
        const auto direct = zf_snr(h, p, s2);
        CHECK(testutil::near_rel(via_rx1.snr1, direct.snr1, 1e-10));
        CHECK(testutil::near_rel(via_rx1.snr2, direct.snr2, 1e-10));
    }
}

static void test_erfc() {
    CHECK_NEAR(erfc_value(0.0), 1.0, 1e-12);
    for (double x : {0.2, 0.9, 1.7, 2.5}) CHECK_NEAR(erfc_value(-x), 2.0 - erfc_value(x), 1e-12);
    for (double x : {0.0, 0.3, 1.0, 1.9, 3.0}) {
        const double q = erfc_by_quadrature(x);
        CHECK_MSG(testutil::near_rel(erfc_value(x), q, 1e-10), "erfc vs quadrature");
    }
}

static void test_ber_approx() {
    CHECK_MSG(ber_16qam_approx(1e6) < 1e-15, "approx BER should vanish at huge SNR");
    // erfc values fed from the quadrature oracle
    const double expected = 0.375 * erfc_by_quadrature(1.0) + 0.25 * erfc_by_quadrature(3.0);
    CHECK_NEAR(ber_16qam_approx(10.0), expected, 1e-9);
    CHECK_NEAR(ber_16qam_approx(10.0), 0.05899, 1e-4);
    // degenerate SNR reported verbatim, not clamped
    CHECK_NEAR(ber_16qam_approx(0.0), 0.625, 1e-12);

    double prev = 1.0;
    for (double snr = 1.0; snr <= 1e4; snr *= 1.12) {
        const double b = ber_16qam_approx(snr);
        // strictly decreasing until erfc underflows to zero
        CHECK_MSG(b < prev || (b == 0.0 && prev < 1e-290), "approx BER must decrease with SNR");
        prev = b;
    }
}

// Monte Carlo 16-QAM over AWGN: two Gray-coded 4-PAM rails per symbol
// with unit mean symbol energy, threshold detection, exact bit
// counting. Oracle for the closed forms.
static double mc_ber_16qam(double snr, long symbols, RandomStream& rng) {
    const double d = std::sqrt(1.0 / 10.0);            // level unit, E_s = 1
    const double sigma_dim = 1.0 / std::sqrt(2.0 * snr);  // per-rail noise
    long long bit_errors = 0;
    auto rail_bits = [](int level_idx) {  // Gray bits per level -3,-1,+1,+3
        static const int bits[4] = {0b00, 0b01, 0b11, 0b10};
        return bits[level_idx];
    };
    for (long s = 0; s < symbols; ++s) {
        for (int rail = 0; rail < 2; ++rail) {
            const int idx = static_cast<int>(rng.uniform01() * 4.0);
            const double rx = (2 * idx - 3) * d + rng.normal(0.0, sigma_dim);
            const int rx_idx = rx < -2.0 * d ? 0 : rx < 0.0 ? 1 : rx < 2.0 * d ? 2 : 3;
            const int diff = rail_bits(idx) ^ rail_bits(rx_idx);
            bit_errors += (diff & 1) + ((diff >> 1) & 1);
        }
    }
    return static_cast<double>(bit_errors) / (4.0 * static_cast<double>(symbols));
}

static void test_ber_exact() {
    CHECK_MSG(ber_16qam_exact(1e6) < 1e-15, "exact BER should vanish at huge SNR");

    // approx keeps the first two terms; they agree closely by 10 dB
    for (double snr_db = 10.0; snr_db <= 30.0; snr_db += 2.5) {
        const double snr = db_to_linear(snr_db);
        const double a = ber_16qam_approx(snr);
        const double e = ber_16qam_exact(snr);
        CHECK_MSG(std::abs(e - a) < 0.05 * a, "exact vs approx drifted apart");
    }
    CHECK_MSG(std::abs(ber_16qam_exact(10.0) - ber_16qam_approx(10.0)) <
                  0.01 * ber_16qam_approx(10.0),
              "exact vs approx at snr = 10");

    // Monte Carlo oracle at 15 dB and at a low-SNR point
    RandomStream rng(77);
    for (double snr_db : {5.0, 15.0}) {
        const double snr = db_to_linear(snr_db);
        const long symbols = 10000000;
        const double mc = mc_ber_16qam(snr, symbols, rng);
        const double theory = ber_16qam_exact(snr);
        const double sigma = std::sqrt(theory * (1.0 - theory) / (4.0 * symbols));
        CHECK_MSG(std::abs(mc - theory) < 3.0 * sigma, "exact BER vs Monte Carlo at " +
                                                           std::to_string(snr_db) + " dB");
    }
}

static void test_prediction_and_rate() {
    const auto pred = ber_prediction(SnrPair{100.0, 25.0}, BerMode::Exact);
    CHECK_NEAR(pred.ber1, ber_16qam_exact(100.0), 1e-15);
    CHECK_NEAR(pred.ber2, ber_16qam_exact(25.0), 1e-15);
    CHECK_NEAR(pred.ber_total, 0.5 * (pred.ber1 + pred.ber2), 1e-15);

    CHECK_NEAR(max_symbol_rate(100e6, 1000), 100e3, 1e-9);
    CHECK_NEAR(max_symbol_rate(100e6, 40), 2.5e6, 1e-9);
    CHECK_NEAR(max_symbol_rate(5e6, 1), 5e6, 1e-9);
    CHECK_THROWS(max_symbol_rate(100e6, 0), std::domain_error);
}

int main() {
    test_zf_snr();
    test_snr_from_rx1();
    test_erfc();
    test_ber_approx();
    test_ber_exact();
    test_prediction_and_rate();
    return testutil::summarize("analysis_test");
}
