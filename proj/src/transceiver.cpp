#include "rismimo/transceiver.hpp"

#include <algorithm>
#include <bit>

#include "rismimo/csvio.hpp"

namespace rismimo {

void FrameConfig::validate() const {
    if (streams != 2) throw std::invalid_argument("FrameConfig: only 2 streams are supported");
    if (data_subframes < 1 || symbols_per_subframe < 1 || bits_per_symbol != 4)
        throw std::invalid_argument("FrameConfig: bad frame dimensions");
    if (pilot_symbols < 2 || pilot_symbols % 2 != 0)
        throw std::invalid_argument("FrameConfig: pilot_symbols must be even and >= 2");
    if (oversampling < 2) throw std::invalid_argument("FrameConfig: oversampling must be >= 2");
    if (symbol_rate <= 0.0) throw std::invalid_argument("FrameConfig: symbol_rate must be positive");
    if (steps && *steps < 2)
        throw std::invalid_argument("FrameConfig: steps must be >= 2 (a single step carries no harmonic)");
}

int pilot_sign(int stream, int slot, int pilot_symbols) {
    const bool active = (stream == 0) == (slot < pilot_symbols / 2);
    if (!active) return 0;
    return slot % 2 == 0 ? 1 : -1;
}

int sync_sign(int slot) { return slot % 2 == 0 ? 1 : -1; }

namespace {

SymbolParams bpsk_params(int sign, double ts) {
    // +-1 on the first harmonic: full 2*pi sweep, t0 = 0 or Ts/2.
    SymbolParams p;
    p.delta_phi = kTwoPi;
    p.t0 = sign > 0 ? 0.0 : 0.5 * ts;
    p.symbol_period = ts;
    return p;
}

SymbolParams silent_params(double ts) {
    SymbolParams p;
    p.delta_phi = 0.0;  // static phase, no first harmonic
    p.symbol_period = ts;
    return p;
}

}  // namespace

Frame build_frame(const std::vector<std::uint8_t>& bits1, const std::vector<std::uint8_t>& bits2,
                  const FrameConfig& cfg) {
    cfg.validate();
    const auto expected = static_cast<std::size_t>(cfg.payload_bits_per_stream());
    if (bits1.size() != expected || bits2.size() != expected)
        throw std::invalid_argument("build_frame: payload must be exactly " +
                                    std::to_string(expected) + " bits per stream");
    const double ts = cfg.symbol_period();
    Frame frame;
    frame.config = cfg;
    frame.payload = {bits1, bits2};
    for (int s = 0; s < 2; ++s) {
        auto& slots = frame.slots[s];
        slots.reserve(cfg.slots_per_stream());
        for (int i = 0; i < cfg.symbols_per_subframe; ++i) {
            FrameSlot slot;
            slot.kind = SlotKind::Sync;
            slot.pilot_sign = sync_sign(i);
            slot.params = bpsk_params(slot.pilot_sign, ts);
            slots.push_back(slot);
        }
        for (int i = 0; i < cfg.pilot_symbols; ++i) {
            FrameSlot slot;
            const int sign = pilot_sign(s, i, cfg.pilot_symbols);
            slot.kind = sign == 0 ? SlotKind::PilotSilent : SlotKind::PilotActive;
            slot.pilot_sign = sign;
            slot.params = sign == 0 ? silent_params(ts) : bpsk_params(sign, ts);
            slots.push_back(slot);
        }
        const auto& bits = frame.payload[s];
        for (std::size_t b = 0; b < bits.size(); b += 4) {
            const std::uint8_t word = static_cast<std::uint8_t>(
                bits[b] << 3 | bits[b + 1] << 2 | bits[b + 2] << 1 | bits[b + 3]);
            const QamMapEntry& entry = map_bits_16qam(word);
            FrameSlot slot;
            slot.kind = SlotKind::Data;
            slot.symbol_index = entry.symbol_index;
            slot.params.t0 = entry.t0_frac * ts;
            slot.params.delta_phi = entry.delta_phi;
            slot.params.symbol_period = ts;
            slots.push_back(slot);
        }
    }
    return frame;
}

cdouble extract_harmonic(const std::vector<cdouble>& samples, int order, int expected_count) {
    const int n = static_cast<int>(samples.size());
    if (n != expected_count)
        throw std::invalid_argument("extract_harmonic: expected " + std::to_string(expected_count) +
                                    " samples per symbol");
    cdouble bin{0.0, 0.0};
    for (int p = 0; p < n; ++p) bin += samples[p] * std::polar(1.0, -order * kTwoPi * p / n);
    bin /= static_cast<double>(n);
    // zero-order-hold factor: the samples stand for constant segments
    return bin * sinc(order * kPi / n) * std::polar(1.0, -order * kPi / n);
}

Mat2 ls_channel_estimate(const RawSymbolStream& rx1, const RawSymbolStream& rx2,
                         const PilotPattern& pilots) {
    const auto slots = static_cast<int>(rx1.values.size());
    if (slots != pilots.pilot_symbols || rx2.values.size() != rx1.values.size())
        throw std::invalid_argument("ls_channel_estimate: pilot slot count mismatch");
    Mat2 h{};
    std::array<int, 2> counts{0, 0};
    for (int i = 0; i < slots; ++i) {
        for (int j = 0; j < 2; ++j) {
            const int sign = pilots.sign(j, i);
            if (sign == 0) continue;  // the other stream's half
            const double p = static_cast<double>(sign);
            (j == 0 ? h.a11 : h.a12) += rx1.values[i] / p;
            (j == 0 ? h.a21 : h.a22) += rx2.values[i] / p;
            ++counts[j];
        }
    }
    if (counts[0] == 0 || counts[1] == 0)
        throw std::invalid_argument("ls_channel_estimate: a stream has no active pilot slots");
    h.a11 /= counts[0];
    h.a21 /= counts[0];
    h.a12 /= counts[1];
    h.a22 /= counts[1];
    return h;
}

std::array<cdouble, 2> zf_equalize(const Mat2& h_est, const std::array<cdouble, 2>& y) {
    if (std::abs(h_est.det()) < 1e-12 * h_est.frob2())
        throw std::domain_error("zf_equalize: channel estimate is singular");
    const Mat2 inv = h_est.inverse();
    std::array<cdouble, 2> s;
    inv.apply(y[0], y[1], s[0], s[1]);
    return s;
}

namespace {

// Solves g(u) = target on u in (-pi, 0], where g is the staircase
// amplitude profile sinc_ratio(u, q) (or sinc(u) in the continuous
// limit), increasing from 0 to 1 on that interval.
double invert_staircase_amplitude(double target, std::optional<int> steps) {
    auto g = [&](double u) { return steps ? sinc_ratio(u, *steps) : sinc(u); };
    if (target >= 1.0) return 0.0;
    double lo = -kPi, hi = 0.0;
    if (g(lo) > target || g(hi) < target)
        throw std::runtime_error("link constellation: amplitude bracket validation failed");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

LinkConstellation make_link_constellation(std::optional<int> steps, double symbol_period) {
    if (steps && *steps < 2)
        throw std::invalid_argument("make_link_constellation: steps must be >= 2");
    LinkConstellation lc;
    lc.steps = steps;
    lc.pilot_factor = steps ? sinc(kPi / *steps) * std::polar(1.0, -kPi / *steps) : cdouble{1.0, 0.0};
    const double pilot_phase = std::arg(lc.pilot_factor);
    for (const QamMapEntry& entry : qam16_table()) {
        const double u = invert_staircase_amplitude(entry.amplitude, steps);
        const double dphi = kTwoPi + 2.0 * u;
        // phase of the unshifted transmitted coefficient
        const double phase0 = steps ? u - dphi / (2.0 * *steps) : u;
        const double target_phase = entry.phase + pilot_phase;
        SymbolParams p;
        p.t0 = wrap_phase(phase0 - target_phase) / kTwoPi * symbol_period;
        p.delta_phi = dphi;
        p.symbol_period = symbol_period;
        p.steps = steps;
        lc.params[entry.symbol_index] = p;
        lc.tx_values[entry.symbol_index] = lc.pilot_factor * entry.point;
    }
    return lc;
}

Mat2 pool_channel_estimates(const std::vector<std::pair<Mat2, double>>& estimates_with_sigma2) {
    if (estimates_with_sigma2.empty())
        throw std::invalid_argument("pool_channel_estimates: no estimates");
    for (const auto& [est, sigma2] : estimates_with_sigma2)
        if (sigma2 <= 0.0) return est;
    Mat2 acc{};
    double wsum = 0.0;
    for (const auto& [est, sigma2] : estimates_with_sigma2) {
        const double w = 1.0 / sigma2;
        acc.a11 += w * est.a11;
        acc.a12 += w * est.a12;
        acc.a21 += w * est.a21;
        acc.a22 += w * est.a22;
        wsum += w;
    }
    return acc * (1.0 / wsum);
}

Mat2 effective_unit_energy_channel(const Mat2& channel, std::optional<int> steps) {
    const cdouble pf = steps ? sinc(kPi / *steps) * std::polar(1.0, -kPi / *steps) : cdouble{1.0, 0.0};
    return channel * (pf * std::sqrt(qam16_mean_energy()));
}

double snr_rx1_of(const Mat2& channel, std::optional<int> steps, double p, double noise_sigma2) {
    const Mat2 eff = effective_unit_energy_channel(channel, steps);
    return p * (std::norm(eff.a11) + std::norm(eff.a12)) / noise_sigma2;
}

double sigma2_for_snr_rx1(const Mat2& channel, std::optional<int> steps, double p,
                          double snr_rx1_linear) {
    if (snr_rx1_linear <= 0.0)
        throw std::invalid_argument("sigma2_for_snr_rx1: snr must be positive");
    const Mat2 eff = effective_unit_energy_channel(channel, steps);
    return p * (std::norm(eff.a11) + std::norm(eff.a12)) / snr_rx1_linear;
}

Mat2 aggregate_half_split(const ChannelMatrix& full, int rows, int cols) {
    if (full.rows != 2 || full.cols != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("aggregate_half_split: channel shape mismatch");
    if (rows % 2 != 0) throw std::invalid_argument("aggregate_half_split: rows must be even");
    Mat2 h{};
    for (int n = 0; n < rows; ++n) {
        for (int m = 0; m < cols; ++m) {
            const std::size_t c = static_cast<std::size_t>(n) * cols + m;
            if (n < rows / 2) {
                h.a11 += full.at(0, c);
                h.a21 += full.at(1, c);
            } else {
                h.a12 += full.at(0, c);
                h.a22 += full.at(1, c);
            }
        }
    }
    return h;
}

std::vector<std::uint8_t> random_bits(std::size_t count, RandomStream& rng) {
    std::vector<std::uint8_t> bits(count);
    for (auto& b : bits) b = rng.next_u64() & 1u;
    return bits;
}

LinkReport run_link(const FrameConfig& cfg, const Mat2& channel, double p, double noise_sigma2,
                    const std::vector<std::uint8_t>& bits1, const std::vector<std::uint8_t>& bits2,
                    std::uint64_t seed, const LinkRunOptions& opts) {
    cfg.validate();
    if (p <= 0.0 || noise_sigma2 < 0.0)
        throw std::invalid_argument("run_link: p must be positive and sigma^2 non-negative");
    if (std::abs(channel.det()) < 1e-12 * channel.frob2())
        throw std::domain_error("run_link: channel is singular");
    const auto per_frame = static_cast<std::size_t>(cfg.payload_bits_per_stream());
    if (bits1.size() != bits2.size() || bits1.empty() || bits1.size() % per_frame != 0)
        throw std::invalid_argument("run_link: payload must be a nonzero multiple of " +
                                    std::to_string(per_frame) + " bits per stream");
    const std::size_t frames = bits1.size() / per_frame;
    const LinkConstellation lc = make_link_constellation(cfg.steps, cfg.symbol_period());
    const RandomStream root(seed);

    auto tx_value = [&](const FrameSlot& slot) -> cdouble {
        switch (slot.kind) {
            case SlotKind::Data: return lc.tx_values[slot.symbol_index];
            case SlotKind::PilotSilent: return {0.0, 0.0};
            default: return lc.pilot_factor * static_cast<double>(slot.pilot_sign);
        }
    };

    const int pilot_begin = cfg.symbols_per_subframe;
    const int data_begin = pilot_begin + cfg.pilot_symbols;
    const int slots_per_stream = cfg.slots_per_stream();
    const double sqrt_p = std::sqrt(p);

    // Pass 1: transmit every frame, buffering the extracted raw
    // symbols. Pilot observations accumulate into one LS estimate for
    // the whole run (the channel is constant across frames).
    std::array<std::vector<cdouble>, 2> data_y;
    data_y[0].reserve(frames * cfg.data_subframes * cfg.symbols_per_subframe);
    data_y[1].reserve(data_y[0].capacity());
    Mat2 ls_acc{};
    std::array<long long, 2> ls_counts{0, 0};

    for (std::size_t f = 0; f < frames; ++f) {
        const auto begin1 = bits1.begin() + static_cast<std::ptrdiff_t>(f * per_frame);
        const auto begin2 = bits2.begin() + static_cast<std::ptrdiff_t>(f * per_frame);
        const Frame frame = build_frame({begin1, begin1 + static_cast<std::ptrdiff_t>(per_frame)},
                                        {begin2, begin2 + static_cast<std::ptrdiff_t>(per_frame)}, cfg);
        RandomStream noise = root.child(f);
        for (int i = 0; i < slots_per_stream; ++i) {
            const cdouble s1 = tx_value(frame.slots[0][i]);
            const cdouble s2 = tx_value(frame.slots[1][i]);
            cdouble y1, y2;
            channel.apply(s1, s2, y1, y2);
            y1 = sqrt_p * y1 + noise.complex_normal(noise_sigma2);
            y2 = sqrt_p * y2 + noise.complex_normal(noise_sigma2);
            if (i >= data_begin) {
                data_y[0].push_back(y1);
                data_y[1].push_back(y2);
            } else if (i >= pilot_begin) {
                const int slot = i - pilot_begin;
                for (int j = 0; j < 2; ++j) {
                    const int sign = pilot_sign(j, slot, cfg.pilot_symbols);
                    if (sign == 0) continue;
                    const double pv = static_cast<double>(sign);
                    (j == 0 ? ls_acc.a11 : ls_acc.a12) += y1 / pv;
                    (j == 0 ? ls_acc.a21 : ls_acc.a22) += y2 / pv;
                    ++ls_counts[j];
                }
            }
        }
    }

    LinkReport report;
    report.h_est = Mat2{ls_acc.a11 / static_cast<double>(ls_counts[0]),
                        ls_acc.a12 / static_cast<double>(ls_counts[1]),
                        ls_acc.a21 / static_cast<double>(ls_counts[0]),
                        ls_acc.a22 / static_cast<double>(ls_counts[1])};

    // Pass 2: equalize and demap.
    report.bits_per_stream = static_cast<long long>(bits1.size());
    if (opts.keep_symbols) {
        report.recovered[0].reserve(data_y[0].size());
        report.recovered[1].reserve(data_y[1].size());
    }
    const Mat2 equalizer = opts.equalizer_estimate.value_or(report.h_est);
    const Mat2 inv = [&] {
        if (std::abs(equalizer.det()) < 1e-12 * equalizer.frob2())
            throw std::domain_error("run_link: estimated channel is singular");
        return equalizer.inverse();
    }();
    const auto& table = qam16_table();
    std::array<long long, 2> errors{0, 0};
    for (std::size_t idx = 0; idx < data_y[0].size(); ++idx) {
        cdouble s1, s2;
        inv.apply(data_y[0][idx], data_y[1][idx], s1, s2);
        if (opts.keep_symbols) {
            report.recovered[0].push_back(s1);
            report.recovered[1].push_back(s2);
        }
        const std::size_t frame = idx / (static_cast<std::size_t>(cfg.data_subframes) * cfg.symbols_per_subframe);
        const std::size_t offset = idx % (static_cast<std::size_t>(cfg.data_subframes) * cfg.symbols_per_subframe);
        const std::size_t bit_base = frame * per_frame + offset * 4;
        const std::array<cdouble, 2> s{s1, s2};
        for (int j = 0; j < 2; ++j) {
            const auto& bits = j == 0 ? bits1 : bits2;
            const std::uint8_t tx_word = static_cast<std::uint8_t>(
                bits[bit_base] << 3 | bits[bit_base + 1] << 2 | bits[bit_base + 2] << 1 |
                bits[bit_base + 3]);
            const std::uint8_t rx_word = demap_symbol(s[j], table);
            errors[j] += std::popcount(static_cast<unsigned>(tx_word ^ rx_word));
        }
    }
    report.errors1 = errors[0];
    report.errors2 = errors[1];
    report.ber1 = static_cast<double>(errors[0]) / static_cast<double>(report.bits_per_stream);
    report.ber2 = static_cast<double>(errors[1]) / static_cast<double>(report.bits_per_stream);
    report.ber_total = 0.5 * (report.ber1 + report.ber2);
    return report;
}

void write_constellation_dump_csv(const std::string& path, const LinkReport& report,
                                  std::uint64_t seed) {
    CsvWriter w(path, {"stream", "slot", "re", "im"});
    for (int j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < report.recovered[j].size(); ++i)
            w.write_row({CsvWriter::fmt_int(j + 1), CsvWriter::fmt_int(static_cast<long long>(i)),
                         CsvWriter::fmt(report.recovered[j][i].real()),
                         CsvWriter::fmt(report.recovered[j][i].imag())});
    w.finish(seed);
}

}  // namespace rismimo
