#pragma once

#include "rismimo/mathutil.hpp"

namespace rismimo {

struct SnrPair {
    double snr1 = 0.0;  // linear power ratio
    double snr2 = 0.0;
};

enum class BerMode { Approximate, Exact };

struct BerPrediction {
    double ber1 = 0.0;
    double ber2 = 0.0;
    double ber_total = 0.0;
    BerMode mode = BerMode::Exact;
};

// Post-equalization SNRs of the two streams for a 2x2 channel under
// zero forcing, assuming unit mean symbol energy:
//   SNR_1 = p |det h|^2 / ((|h22|^2 + |h12|^2) sigma^2)
//   SNR_2 = p |det h|^2 / ((|h21|^2 + |h11|^2) sigma^2)
// Throws std::domain_error for singular channels.
SnrPair zf_snr(const Mat2& h, double p, double noise_sigma2);

// Converts the SNR measured on receive chain 1,
// snr_rx1 = p (|h11|^2 + |h12|^2) / sigma^2, into per-stream
// post-equalization SNRs. Scale-invariant in h.
SnrPair snr_from_rx1(double snr_rx1, const Mat2& h);

// Complementary error function backing the BER expressions.
double erfc_value(double x);

// Two-term approximation of the Gray-coded 16-QAM bit error rate over
// AWGN. Can exceed 0.5 at degenerate SNR; callers report that verbatim.
double ber_16qam_approx(double snr);

// Exact Gray-coded 16-QAM bit error rate over AWGN (all erfc terms).
double ber_16qam_exact(double snr);

BerPrediction ber_prediction(const SnrPair& snr, BerMode mode);

// DAC-limited symbol rate bound: r_dac / q.
double max_symbol_rate(double r_dac, int q);

}  // namespace rismimo
