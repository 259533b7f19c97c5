#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rismimo/channel.hpp"
#include "rismimo/mathutil.hpp"
#include "rismimo/modulation.hpp"
#include "rismimo/rng.hpp"

namespace rismimo {

struct FrameConfig {
    int data_subframes = 60;
    int symbols_per_subframe = 64;
    int bits_per_symbol = 4;
    int streams = 2;
    int pilot_symbols = 64;
    int oversampling = 8;
    double symbol_rate = 2.5e6;
    std::optional<int> steps = 40;  // q; nullopt = continuous phase ramps

    double symbol_period() const { return 1.0 / symbol_rate; }
    int payload_bits_per_stream() const { return data_subframes * symbols_per_subframe * bits_per_symbol; }
    int payload_bits_per_frame() const { return streams * payload_bits_per_stream(); }
    int slots_per_stream() const {
        return symbols_per_subframe + pilot_symbols + data_subframes * symbols_per_subframe;
    }
    void validate() const;
};

enum class SlotKind { Sync, PilotActive, PilotSilent, Data };

struct FrameSlot {
    SlotKind kind = SlotKind::Data;
    int pilot_sign = 0;    // +-1 for Sync / PilotActive slots
    int symbol_index = 0;  // Data slots: 16-QAM table row
    SymbolParams params;   // continuous-ramp realization, Ts from config
};

struct Frame {
    FrameConfig config;
    std::array<std::vector<FrameSlot>, 2> slots;         // per stream
    std::array<std::vector<std::uint8_t>, 2> payload;    // bits, 0/1
};

// Transmitted pilot value of stream j in pilot slot i: +-1 while the
// stream owns the slot (stream 0 the first half, stream 1 the second),
// 0 while silent.
int pilot_sign(int stream, int slot, int pilot_symbols);
int sync_sign(int slot);

// Lays out one frame: sync subframe (fixed BPSK pattern on both
// streams), pilot subframe with time-orthogonal halves (stream 0
// active in slots 0..31, stream 1 in 32..63, the other stream silent
// via delta_phi = 0), then data subframes mapped 4 bits per symbol.
// Each bits vector must hold exactly payload_bits_per_stream() bits.
Frame build_frame(const std::vector<std::uint8_t>& bits1, const std::vector<std::uint8_t>& bits2,
                  const FrameConfig& cfg);

// First-order Fourier coefficient of the staircase waveform the
// samples came from: DFT bin `order` normalized by the sample count,
// times the zero-order-hold factor sinc(order*pi/n)*exp(-j*order*pi/n).
// Feeding it the q = 8 staircase of a symbol reproduces that symbol's
// closed-form staircase coefficient exactly.
cdouble extract_harmonic(const std::vector<cdouble>& samples, int order,
                         int expected_count = 8);

// Extracted raw symbols of one receive antenna.
struct RawSymbolStream {
    std::vector<cdouble> values;
    double noise_sigma2 = 0.0;
};

// Known pilot subframe layout (time-orthogonal halves).
struct PilotPattern {
    int pilot_symbols = 64;
    int sign(int stream, int slot) const { return pilot_sign(stream, slot, pilot_symbols); }
};

// Least-squares estimate of sqrt(p) * h: per entry, the mean of
// Y_k / P_j over stream j's active pilot slots.
Mat2 ls_channel_estimate(const RawSymbolStream& rx1, const RawSymbolStream& rx2,
                         const PilotPattern& pilots);

// S~ = h_est^-1 * Y. Throws std::domain_error when |det| falls below
// 1e-12 times the squared Frobenius norm.
std::array<cdouble, 2> zf_equalize(const Mat2& h_est, const std::array<cdouble, 2>& y);

// Per-q transmit mapping. For a finite step count the staircase
// distorts each ring by a known factor; the mapper re-solves
// (delta_phi, t0) so the transmitted coefficient equals the ideal
// constellation point times the q-dependent outer-ring factor. The
// common factor cancels in zero-forcing, so the recovered
// constellation is exactly the ideal one at any q.
struct LinkConstellation {
    std::optional<int> steps;
    cdouble pilot_factor{1.0, 0.0};          // transmitted value of a +1 pilot
    std::array<SymbolParams, 16> params;     // compensated per table row
    std::array<cdouble, 16> tx_values;       // transmitted harmonic per row
};

LinkConstellation make_link_constellation(std::optional<int> steps, double symbol_period);

struct LinkReport {
    Mat2 h_est;  // estimated sqrt(p) * effective channel
    double ber1 = 0.0, ber2 = 0.0, ber_total = 0.0;
    long long bits_per_stream = 0;
    long long errors1 = 0, errors2 = 0;
    std::array<std::vector<cdouble>, 2> recovered;  // S~ per stream, kept on request
};

struct LinkRunOptions {
    bool keep_symbols = false;
    // Equalize with this estimate instead of the run's own LS result.
    // Sweeps over a constant channel pool pilot observations from all
    // their runs into one tight estimate and pass it here; the report
    // still carries the run's own LS estimate.
    std::optional<Mat2> equalizer_estimate;
};

// End-to-end 2x2 link over a constant aggregated channel: frame
// construction, per-symbol staircase harmonics, Y = sqrt(p)*h*s + W
// with per-symbol noise of variance noise_sigma2 per antenna, LS
// channel estimation averaged over all frames, ZF, Euclidean
// demapping, BER accounting. Payload sizes must be equal nonzero
// multiples of the per-stream frame payload.
LinkReport run_link(const FrameConfig& cfg, const Mat2& channel, double p, double noise_sigma2,
                    const std::vector<std::uint8_t>& bits1, const std::vector<std::uint8_t>& bits2,
                    std::uint64_t seed, const LinkRunOptions& opts = {});

// Inverse-variance-weighted mean of per-run LS estimates taken over
// the same constant channel at different noise levels. A noiseless
// run's estimate is exact and is returned as-is.
Mat2 pool_channel_estimates(const std::vector<std::pair<Mat2, double>>& estimates_with_sigma2);

// Unit-mean-symbol-energy equivalent of the aggregated channel: h
// times the pilot factor times sqrt(mean constellation energy). SNR
// definitions and BER theory apply to this matrix.
Mat2 effective_unit_energy_channel(const Mat2& channel, std::optional<int> steps);

// Measured SNR on receive chain 1 for the given link parameters.
double snr_rx1_of(const Mat2& channel, std::optional<int> steps, double p, double noise_sigma2);

// Noise variance that realizes a target rx-chain-1 SNR.
double sigma2_for_snr_rx1(const Mat2& channel, std::optional<int> steps, double p,
                          double snr_rx1_linear);

// Eq-33-style aggregation of a full 2 x (N*M) channel into the 2x2
// split-surface channel: stream 1 drives rows [0, N/2), stream 2 the
// rest. N must be even.
Mat2 aggregate_half_split(const ChannelMatrix& full, int rows, int cols);

// Seeded payload generator.
std::vector<std::uint8_t> random_bits(std::size_t count, RandomStream& rng);

// Recovered-constellation dump: stream,slot,re,im.
void write_constellation_dump_csv(const std::string& path, const LinkReport& report,
                                  std::uint64_t seed);

}  // namespace rismimo
