#include "rismimo/analysis.hpp"

#include <stdexcept>

namespace rismimo {

namespace {

void check_invertible(const Mat2& h) {
    if (std::abs(h.det()) * std::abs(h.det()) <= 1e-24 * h.frob2() * h.frob2())
        throw std::domain_error("analysis: channel matrix is singular");
}

}  // namespace

SnrPair zf_snr(const Mat2& h, double p, double noise_sigma2) {
    check_invertible(h);
    if (p <= 0.0 || noise_sigma2 <= 0.0)
        throw std::domain_error("zf_snr: p and sigma^2 must be positive");
    const double det2 = std::norm(h.det());
    return {p * det2 / ((std::norm(h.a22) + std::norm(h.a12)) * noise_sigma2),
            p * det2 / ((std::norm(h.a21) + std::norm(h.a11)) * noise_sigma2)};
}

SnrPair snr_from_rx1(double snr_rx1, const Mat2& h) {
    check_invertible(h);
    if (snr_rx1 <= 0.0) throw std::domain_error("snr_from_rx1: snr_rx1 must be positive");
    const double det2 = std::norm(h.det());
    const double rx1 = std::norm(h.a11) + std::norm(h.a12);
    return {snr_rx1 * det2 / ((std::norm(h.a22) + std::norm(h.a12)) * rx1),
            snr_rx1 * det2 / ((std::norm(h.a21) + std::norm(h.a11)) * rx1)};
}

double erfc_value(double x) { return std::erfc(x); }

double ber_16qam_approx(double snr) {
    if (snr < 0.0) throw std::domain_error("ber_16qam_approx: snr must be >= 0");
    const double x = std::sqrt(snr / 10.0);
    return 0.375 * erfc_value(x) + 0.25 * erfc_value(3.0 * x);
}

// Gray-coded square 16-QAM over AWGN decomposes into two 4-PAM rails;
// averaging the per-bit error probabilities of both rail bits gives
// three erfc terms. The two-term form above drops the last one.
double ber_16qam_exact(double snr) {
    if (snr < 0.0) throw std::domain_error("ber_16qam_exact: snr must be >= 0");
    const double x = std::sqrt(snr / 10.0);
    return 0.375 * erfc_value(x) + 0.25 * erfc_value(3.0 * x) - 0.125 * erfc_value(5.0 * x);
}

BerPrediction ber_prediction(const SnrPair& snr, BerMode mode) {
    auto ber = mode == BerMode::Exact ? ber_16qam_exact : ber_16qam_approx;
    BerPrediction p;
    p.ber1 = ber(snr.snr1);
    p.ber2 = ber(snr.snr2);
    p.ber_total = 0.5 * (p.ber1 + p.ber2);
    p.mode = mode;
    return p;
}

double max_symbol_rate(double r_dac, int q) {
    if (r_dac <= 0.0) throw std::domain_error("max_symbol_rate: r_dac must be positive");
    if (q < 1) throw std::domain_error("max_symbol_rate: q must be >= 1");
    return r_dac / q;
}

}  // namespace rismimo
