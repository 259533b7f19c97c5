// Command-line front end: experiment orchestration and CSV emission
// for the RIS-based MIMO-QAM link simulator.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <limits>
#include <string>
#include <vector>

#include "rismimo/analysis.hpp"
#include "rismimo/channel.hpp"
#include "rismimo/csvio.hpp"
#include "rismimo/modulation.hpp"
#include "rismimo/ris_core.hpp"
#include "rismimo/transceiver.hpp"

using namespace rismimo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

// Flat key=value configuration with command-line precedence: a file
// value is applied only when the matching option was not given on the
// command line. Unknown keys are config errors.
class ConfigBinder {
public:
    explicit ConfigBinder(CLI::App* sub) : sub_(sub) {}

    void bind(const std::string& key, std::string& field) {
        setters_[key] = [&field](const std::string& v) { field = v; };
    }
    void bind(const std::string& key, long long& field) {
        setters_[key] = [&field](const std::string& v) { field = std::stoll(v); };
    }
    void bind(const std::string& key, int& field) {
        setters_[key] = [&field](const std::string& v) { field = std::stoi(v); };
    }
    void bind(const std::string& key, double& field) {
        setters_[key] = [&field](const std::string& v) { field = std::stod(v); };
    }
    void bind(const std::string& key, std::uint64_t& field) {
        setters_[key] = [&field](const std::string& v) { field = std::stoull(v); };
    }
    void bind(const std::string& key, std::vector<std::string>& field) {
        setters_[key] = [&field](const std::string& v) { field = split_list(v); };
    }
    void bind(const std::string& key, std::vector<int>& field) {
        setters_[key] = [&field](const std::string& v) {
            field.clear();
            for (const auto& tok : split_list(v)) field.push_back(std::stoi(tok));
        };
    }

    void apply(const std::string& path) const {
        if (path.empty()) return;
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open config file " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line is not key=value: " + line);
            const std::string key = line.substr(0, eq);
            const std::string value = line.substr(eq + 1);
            const auto it = setters_.find(key);
            if (it == setters_.end())
                throw std::invalid_argument("unknown config key: " + key);
            if (sub_->count("--" + key) > 0) continue;  // flags win
            it->second(value);
        }
    }

private:
    CLI::App* sub_;
    std::map<std::string, std::function<void(const std::string&)>> setters_;
};

struct SurfaceOptions {
    std::string antennas_csv;  // x,y,z positions; empty = no geometry
    int ris_rows = 32;
    int ris_cols = 8;
    double cell_size = 0.035;
    double carrier_freq = 4.25e9;
    double cell_gain_db = 9.0;
    double antenna_gain_db = 7.4;
    double flux = 1.0;
};

struct SweepOptions {
    std::vector<std::string> snr_db_tokens{"0", "2", "4", "6", "8", "10", "12",
                                           "14", "16", "18", "20", "22", "24"};
    long long bits = 1000000;
    int q = 40;  // 0 = continuous phase ramps
    double symbol_rate = 2.5e6;
    std::uint64_t seed = 1;
    std::string out = "ber_sweep.csv";
    std::string channel_csv;
    std::string payload_file;
    SurfaceOptions surface;
};

std::vector<double> parse_snr_grid(const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw std::invalid_argument("snr grid is empty");
    std::vector<double> grid;
    for (const auto& t : tokens) {
        if (t == "inf" || t == "INF" || t == "Inf")
            grid.push_back(kInf);
        else
            grid.push_back(std::stod(t));
    }
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("snr grid must be strictly increasing");
    return grid;
}

std::optional<int> steps_from_q(int q) {
    if (q == 0) return std::nullopt;
    if (q < 2) throw std::invalid_argument("q must be >= 2 (or 0 for continuous ramps)");
    return q;
}

// Aggregated 2x2 channel: from surface geometry when antenna positions
// are given, from a CSV matrix when provided, else drawn once from the
// seed. Geometry runs also report the per-cell transmit power p.
Mat2 resolve_channel(const std::string& channel_csv, const SurfaceOptions& surface,
                     std::uint64_t seed, double& cell_power) {
    cell_power = 1.0;
    if (!surface.antennas_csv.empty()) {
        const auto positions = read_positions_csv(surface.antennas_csv);
        if (positions.size() != 2)
            throw std::invalid_argument("antenna positions csv must hold exactly 2 rows");
        RisGeometry geom;
        geom.rows = surface.ris_rows;
        geom.cols = surface.ris_cols;
        geom.cell_width = geom.cell_length = surface.cell_size;
        geom.carrier_freq = surface.carrier_freq;
        geom.cell_gain = db_to_linear(surface.cell_gain_db);
        geom.pattern = cosine_pattern();
        std::vector<RxAntennaConfig> antennas;
        for (const auto& pos : positions) {
            RxAntennaConfig rx;
            rx.gain = db_to_linear(surface.antenna_gain_db);
            rx.pattern = cosine_pattern();
            rx.position = pos;
            antennas.push_back(std::move(rx));
        }
        const ChannelMatrix full = free_space_channel_matrix(geom, antennas, surface.flux);
        cell_power = full.cell_power;
        return aggregate_half_split(full, geom.rows, geom.cols);
    }
    if (!channel_csv.empty()) {
        const ChannelMatrix m = read_channel_csv(channel_csv);
        if (m.rows != 2 || m.cols != 2)
            throw std::invalid_argument("channel csv must be a 2x2 matrix");
        return Mat2{m.at(0, 0), m.at(0, 1), m.at(1, 0), m.at(1, 1)};
    }
    RandomStream rng = RandomStream(seed).child(0xC0FFEE);
    return random_channel_2x2(rng);
}

std::vector<std::uint8_t> bits_from_file(const std::string& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open payload file " + path);
    std::vector<std::uint8_t> bits;
    bits.reserve(count);
    char byte;
    while (bits.size() < count && in.get(byte))
        for (int b = 7; b >= 0 && bits.size() < count; --b)
            bits.push_back((static_cast<unsigned char>(byte) >> b) & 1u);
    if (bits.size() < count)
        throw std::invalid_argument("payload file holds fewer than the required bits");
    return bits;
}

struct PayloadSource {
    std::string file;
    std::uint64_t seed = 0;

    std::array<std::vector<std::uint8_t>, 2> make(std::size_t per_stream,
                                                  std::uint64_t tag) const {
        if (!file.empty()) {
            const auto all = bits_from_file(file, 2 * per_stream);
            return {std::vector<std::uint8_t>(all.begin(), all.begin() + per_stream),
                    std::vector<std::uint8_t>(all.begin() + per_stream, all.end())};
        }
        RandomStream rng = RandomStream(seed).child(0xB175 + tag);
        auto b1 = random_bits(per_stream, rng);
        auto b2 = random_bits(per_stream, rng);
        return {std::move(b1), std::move(b2)};
    }
};

std::size_t frames_for_bits(long long bits, const FrameConfig& cfg) {
    if (bits < 10000) throw std::invalid_argument("bits per point must be >= 10000");
    const long long per_frame = cfg.payload_bits_per_frame();
    return static_cast<std::size_t>((bits + per_frame - 1) / per_frame);
}

std::string fmt_snr_token(double snr_db) {
    return std::isinf(snr_db) ? "inf" : CsvWriter::fmt(snr_db);
}

int cmd_ber_sweep(const SweepOptions& opt) {
    const auto grid = parse_snr_grid(opt.snr_db_tokens);
    FrameConfig cfg;
    cfg.steps = steps_from_q(opt.q);
    cfg.symbol_rate = opt.symbol_rate;
    double p = 1.0;
    const Mat2 channel = resolve_channel(opt.channel_csv, opt.surface, opt.seed, p);
    const std::size_t frames = frames_for_bits(opt.bits, cfg);
    const std::size_t per_stream = frames * cfg.payload_bits_per_stream();
    const PayloadSource payload{opt.payload_file, opt.seed};

    // pass 1: each point's own LS estimate; the channel is constant
    // across the sweep, so the pilots pool into one tight estimate
    std::vector<double> sigma2s;
    std::vector<std::pair<Mat2, double>> estimates;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto bits = payload.make(per_stream, i);
        const double sigma2 =
            std::isinf(grid[i])
                ? 0.0
                : sigma2_for_snr_rx1(channel, cfg.steps, p, db_to_linear(grid[i]));
        sigma2s.push_back(sigma2);
        const auto report =
            run_link(cfg, channel, p, sigma2, bits[0], bits[1], opt.seed + 17 * i);
        estimates.emplace_back(report.h_est, sigma2);
    }
    LinkRunOptions run_opts;
    run_opts.equalizer_estimate = pool_channel_estimates(estimates);

    CsvWriter csv(opt.out, {"snr_rx1_db", "ber_stream1", "ber_stream2", "ber_total",
                            "ber_theory1", "ber_theory2", "ber_theory_total", "bits"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double snr_db = grid[i];
        const auto bits = payload.make(per_stream, i);
        const BerPrediction theory =
            std::isinf(snr_db)
                ? BerPrediction{0.0, 0.0, 0.0, BerMode::Exact}
                : ber_prediction(snr_from_rx1(db_to_linear(snr_db), channel), BerMode::Exact);
        const auto report = run_link(cfg, channel, p, sigma2s[i], bits[0], bits[1],
                                     opt.seed + 17 * i, run_opts);
        csv.write_row({fmt_snr_token(snr_db), CsvWriter::fmt(report.ber1),
                       CsvWriter::fmt(report.ber2), CsvWriter::fmt(report.ber_total),
                       CsvWriter::fmt(theory.ber1), CsvWriter::fmt(theory.ber2),
                       CsvWriter::fmt(theory.ber_total),
                       CsvWriter::fmt_int(2 * report.bits_per_stream)});
    }
    csv.finish(opt.seed);
    return 0;
}

struct DiscOptions {
    SweepOptions sweep;
    std::vector<int> q_list{40, 10};
    std::vector<int> amp_q_list{2, 4, 8, 10, 16, 40};
    std::string amp_out = "disc_amplitude.csv";
};

int cmd_disc_sweep(const DiscOptions& opt) {
    // staircase first-harmonic amplitude at the full sweep
    CsvWriter amp_csv(opt.amp_out, {"q", "amp_a1"});
    for (int q : opt.amp_q_list) {
        SymbolParams p;
        p.delta_phi = kTwoPi;
        p.steps = q;
        amp_csv.write_row(
            {CsvWriter::fmt_int(q),
             CsvWriter::fmt(discrete_harmonic_coefficient(p, 1).amplitude())});
    }
    amp_csv.finish(opt.sweep.seed);

    const auto grid = parse_snr_grid(opt.sweep.snr_db_tokens);
    double p = 1.0;
    const Mat2 channel = resolve_channel(opt.sweep.channel_csv, opt.sweep.surface,
                                         opt.sweep.seed, p);
    CsvWriter csv(opt.sweep.out,
                  {"q", "snr_rx1_db", "ber_stream1", "ber_stream2", "ber_total", "bits"});
    for (int q : opt.q_list) {
        FrameConfig cfg;
        cfg.steps = steps_from_q(q);
        cfg.symbol_rate = opt.sweep.symbol_rate;
        const std::size_t frames = frames_for_bits(opt.sweep.bits, cfg);
        const std::size_t per_stream = frames * cfg.payload_bits_per_stream();
        const PayloadSource payload{opt.sweep.payload_file, opt.sweep.seed};
        std::vector<double> sigma2s;
        std::vector<std::pair<Mat2, double>> estimates;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto bits = payload.make(per_stream, i);
            const double sigma2 =
                std::isinf(grid[i])
                    ? 0.0
                    : sigma2_for_snr_rx1(channel, cfg.steps, p, db_to_linear(grid[i]));
            sigma2s.push_back(sigma2);
            const auto report =
                run_link(cfg, channel, p, sigma2, bits[0], bits[1], opt.sweep.seed + 17 * i);
            estimates.emplace_back(report.h_est, sigma2);
        }
        LinkRunOptions run_opts;
        run_opts.equalizer_estimate = pool_channel_estimates(estimates);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto bits = payload.make(per_stream, i);
            const auto report = run_link(cfg, channel, p, sigma2s[i], bits[0], bits[1],
                                         opt.sweep.seed + 17 * i, run_opts);
            csv.write_row({CsvWriter::fmt_int(q), fmt_snr_token(grid[i]),
                           CsvWriter::fmt(report.ber1), CsvWriter::fmt(report.ber2),
                           CsvWriter::fmt(report.ber_total),
                           CsvWriter::fmt_int(2 * report.bits_per_stream)});
        }
    }
    csv.finish(opt.sweep.seed);
    return 0;
}

struct SolveMapOptions {
    std::string profile = "ideal";
    int order = 1;
    std::uint64_t seed = 1;
    std::string out = "constellation.csv";
};

AmplitudePhaseProfile profile_by_name(const std::string& name) {
    if (name == "ideal") return AmplitudePhaseProfile::ideal();
    if (name == "triangular-3db") return AmplitudePhaseProfile::triangular_3db();
    return profile_from_csv(name);
}

int cmd_solve_map(const SolveMapOptions& opt) {
    const auto profile = profile_by_name(opt.profile);
    const double amp_max = max_harmonic_amplitude(profile, opt.order);
    CsvWriter csv(opt.out, {"symbol_index", "bits", "amp", "phase_rad", "t0_frac",
                            "delta_phi_rad", "residual_amp", "residual_phase_rad"});
    for (const auto& entry : qam16_table()) {
        const double target_amp = entry.amplitude * amp_max;
        char bits_str[5];
        std::snprintf(bits_str, sizeof(bits_str), "%d%d%d%d", entry.bits >> 3 & 1,
                      entry.bits >> 2 & 1, entry.bits >> 1 & 1, entry.bits & 1);
        try {
            const SymbolParams p = solve_mapping(profile, target_amp, entry.phase, opt.order);
            const cdouble achieved =
                harmonic_by_quadrature(profile, p.delta_phi, p.t0_frac(), opt.order);
            csv.write_row({CsvWriter::fmt_int(entry.symbol_index), bits_str,
                           CsvWriter::fmt(target_amp), CsvWriter::fmt(entry.phase),
                           CsvWriter::fmt(p.t0_frac()), CsvWriter::fmt(p.delta_phi),
                           CsvWriter::fmt(std::abs(std::abs(achieved) - target_amp)),
                           CsvWriter::fmt(phase_distance(std::arg(achieved), entry.phase))});
        } catch (const std::exception& e) {
            std::fprintf(stderr, "symbol %d unreachable: %s\n", entry.symbol_index, e.what());
            csv.write_row({CsvWriter::fmt_int(entry.symbol_index), bits_str,
                           CsvWriter::fmt(target_amp), CsvWriter::fmt(entry.phase), "nan", "nan",
                           "nan", "nan"});
        }
    }
    csv.finish(opt.seed);
    return 0;
}

struct BeamScanOptions {
    std::vector<int> nm_list{16, 64, 256};
    double distance = 200.0;
    double carrier_freq = 4.25e9;
    double cell_size = 0.035;
    int trials = 200;
    std::uint64_t seed = 1;
    std::string out = "beam_scan.csv";
};

int cmd_beam_scan(const BeamScanOptions& opt) {
    CsvWriter csv(opt.out, {"nm", "amp_beamformed", "amp_random_mean"});
    RandomStream rng = RandomStream(opt.seed).child(0xBEA3);
    for (int nm : opt.nm_list) {
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(nm))));
        if (side * side != nm)
            throw std::invalid_argument("nm values must be perfect squares (square arrays)");
        RisGeometry geom;
        geom.rows = geom.cols = side;
        geom.cell_width = geom.cell_length = opt.cell_size;
        geom.carrier_freq = opt.carrier_freq;
        RxAntennaConfig rx;
        rx.position = {0.0, 0.0, opt.distance};
        std::vector<std::vector<LinkGeometry>> links(1);
        std::vector<double> distances;
        for (int n = 0; n < side; ++n) {
            for (int m = 0; m < side; ++m) {
                links[0].push_back(link_between(geom, n, m, rx.position));
                distances.push_back(links[0].back().distance);
            }
        }
        const auto beam = beamforming_matrix(distances, geom.wavelength());
        std::vector<ReflectionCoefficient> gammas;
        for (double ph : beam.phases) gammas.push_back({1.0, ph});
        const double amp_beam =
            std::abs(received_signal(geom, gammas, {rx}, 1.0, links)[0]);

        double acc = 0.0;
        for (int t = 0; t < opt.trials; ++t) {
            std::vector<ReflectionCoefficient> random_gammas;
            random_gammas.reserve(gammas.size());
            for (int c = 0; c < nm; ++c) random_gammas.push_back({1.0, rng.uniform01() * kTwoPi});
            acc += std::abs(received_signal(geom, random_gammas, {rx}, 1.0, links)[0]);
        }
        csv.write_row({CsvWriter::fmt_int(nm), CsvWriter::fmt(amp_beam),
                       CsvWriter::fmt(acc / opt.trials)});
    }
    csv.finish(opt.seed);
    return 0;
}

struct PredictOptions {
    std::vector<std::string> snr_db_tokens{"0", "5", "10", "15", "20", "25"};
    std::uint64_t seed = 1;
    std::string out = "predict.csv";
    std::string channel_csv;
};

int cmd_predict(const PredictOptions& opt) {
    const auto grid = parse_snr_grid(opt.snr_db_tokens);
    double p = 1.0;
    const Mat2 channel = resolve_channel(opt.channel_csv, SurfaceOptions{}, opt.seed, p);
    CsvWriter csv(opt.out, {"snr_rx1_db", "snr1", "snr2", "ber1_approx", "ber2_approx",
                            "ber_total_approx", "ber1_exact", "ber2_exact", "ber_total_exact"});
    for (double snr_db : grid) {
        if (std::isinf(snr_db)) {
            csv.write_row({"inf", "inf", "inf", "0", "0", "0", "0", "0", "0"});
            continue;
        }
        const SnrPair snr = snr_from_rx1(db_to_linear(snr_db), channel);
        const auto approx = ber_prediction(snr, BerMode::Approximate);
        const auto exact = ber_prediction(snr, BerMode::Exact);
        if (approx.ber1 > 0.5 || approx.ber2 > 0.5)
            std::fprintf(stderr,
                         "warning: approximate BER exceeds 0.5 at %g dB; the two-term "
                         "expression degenerates at low SNR\n",
                         snr_db);
        csv.write_row({fmt_snr_token(snr_db), CsvWriter::fmt(snr.snr1), CsvWriter::fmt(snr.snr2),
                       CsvWriter::fmt(approx.ber1), CsvWriter::fmt(approx.ber2),
                       CsvWriter::fmt(approx.ber_total), CsvWriter::fmt(exact.ber1),
                       CsvWriter::fmt(exact.ber2), CsvWriter::fmt(exact.ber_total)});
    }
    csv.finish(opt.seed);
    return 0;
}

struct DumpOptions {
    std::string snr_db = "20";
    int frames = 1;
    int q = 40;
    double symbol_rate = 2.5e6;
    std::uint64_t seed = 1;
    std::string out = "constellation_dump.csv";
    std::string channel_csv;
    std::string payload_file;
    SurfaceOptions surface;
};

int cmd_dump_constellation(const DumpOptions& opt) {
    FrameConfig cfg;
    cfg.steps = steps_from_q(opt.q);
    cfg.symbol_rate = opt.symbol_rate;
    if (opt.frames < 1) throw std::invalid_argument("frames must be >= 1");
    double p = 1.0;
    const Mat2 channel = resolve_channel(opt.channel_csv, opt.surface, opt.seed, p);
    const double snr_db = opt.snr_db == "inf" ? kInf : std::stod(opt.snr_db);
    const double sigma2 =
        std::isinf(snr_db) ? 0.0
                           : sigma2_for_snr_rx1(channel, cfg.steps, p, db_to_linear(snr_db));
    const std::size_t per_stream =
        static_cast<std::size_t>(opt.frames) * cfg.payload_bits_per_stream();
    const PayloadSource payload{opt.payload_file, opt.seed};
    const auto bits = payload.make(per_stream, 0);
    LinkRunOptions run_opts;
    run_opts.keep_symbols = true;
    const auto report = run_link(cfg, channel, p, sigma2, bits[0], bits[1], opt.seed, run_opts);
    write_constellation_dump_csv(opt.out, report, opt.seed);
    return 0;
}

}  // namespace


void add_surface_options(CLI::App* sub, SurfaceOptions& s, ConfigBinder& cfg) {
    sub->add_option("--antennas", s.antennas_csv,
                    "antenna positions CSV (x,y,z); derives the channel from surface geometry");
    sub->add_option("--ris-rows", s.ris_rows, "surface rows (geometry mode)");
    sub->add_option("--ris-cols", s.ris_cols, "surface columns (geometry mode)");
    sub->add_option("--cell-size", s.cell_size, "cell width and length in meters");
    sub->add_option("--freq", s.carrier_freq, "carrier frequency in Hz");
    sub->add_option("--cell-gain-db", s.cell_gain_db, "unit cell gain in dBi");
    sub->add_option("--antenna-gain-db", s.antenna_gain_db, "receive antenna gain in dBi");
    sub->add_option("--flux", s.flux, "incident energy flux density in W/m^2");
    cfg.bind("antennas", s.antennas_csv);
    cfg.bind("ris-rows", s.ris_rows);
    cfg.bind("ris-cols", s.ris_cols);
    cfg.bind("cell-size", s.cell_size);
    cfg.bind("freq", s.carrier_freq);
    cfg.bind("cell-gain-db", s.cell_gain_db);
    cfg.bind("antenna-gain-db", s.antenna_gain_db);
    cfg.bind("flux", s.flux);
}

int run_main(int argc, char** argv) {
    CLI::App app{"RIS-based 2x2 MIMO 16-QAM link simulator"};
    app.require_subcommand(1);
    std::string config_path;

    SweepOptions ber_opt;
    auto* ber = app.add_subcommand("ber-sweep", "measured and theoretical BER versus SNR");
    ber->add_option("--config", config_path, "flat key=value config file");
    ber->add_option("--snr-db", ber_opt.snr_db_tokens,
                    "SNR grid in dB, strictly increasing ('inf' allowed)")->delimiter(',');
    ber->add_option("--bits", ber_opt.bits, "payload bits per point (>= 10000)");
    ber->add_option("--q", ber_opt.q, "discrete phase steps per symbol (0 = continuous)");
    ber->add_option("--seed", ber_opt.seed, "random seed");
    ber->add_option("--out", ber_opt.out, "output CSV path");
    ber->add_option("--channel", ber_opt.channel_csv, "2x2 channel CSV (default: drawn from seed)");
    ber->add_option("--payload", ber_opt.payload_file, "raw binary payload file");
    ber->add_option("--symbol-rate", ber_opt.symbol_rate, "symbols per second");
    ConfigBinder ber_cfg(ber);
    ber_cfg.bind("snr-db", ber_opt.snr_db_tokens);
    ber_cfg.bind("bits", ber_opt.bits);
    ber_cfg.bind("q", ber_opt.q);
    ber_cfg.bind("symbol-rate", ber_opt.symbol_rate);
    ber_cfg.bind("seed", ber_opt.seed);
    ber_cfg.bind("out", ber_opt.out);
    ber_cfg.bind("channel", ber_opt.channel_csv);
    ber_cfg.bind("payload", ber_opt.payload_file);
    add_surface_options(ber, ber_opt.surface, ber_cfg);

    DiscOptions disc_opt;
    auto* disc = app.add_subcommand("disc-sweep",
                                    "discretization experiments: staircase amplitude and BER per q");
    disc->add_option("--config", config_path, "flat key=value config file");
    disc->add_option("--snr-db", disc_opt.sweep.snr_db_tokens, "SNR grid in dB")->delimiter(',');
    disc->add_option("--bits", disc_opt.sweep.bits, "payload bits per point (>= 10000)");
    disc->add_option("--q-list", disc_opt.q_list, "step counts for the BER comparison")->delimiter(',');
    disc->add_option("--amp-q-list", disc_opt.amp_q_list, "step counts for the amplitude table")->delimiter(',');
    disc->add_option("--seed", disc_opt.sweep.seed, "random seed");
    disc->add_option("--out", disc_opt.sweep.out, "BER CSV path");
    disc->add_option("--amp-out", disc_opt.amp_out, "amplitude table CSV path");
    disc->add_option("--channel", disc_opt.sweep.channel_csv, "2x2 channel CSV");
    disc->add_option("--symbol-rate", disc_opt.sweep.symbol_rate, "symbols per second");
    ConfigBinder disc_cfg(disc);
    disc_cfg.bind("snr-db", disc_opt.sweep.snr_db_tokens);
    disc_cfg.bind("bits", disc_opt.sweep.bits);
    disc_cfg.bind("q-list", disc_opt.q_list);
    disc_cfg.bind("amp-q-list", disc_opt.amp_q_list);
    disc_cfg.bind("symbol-rate", disc_opt.sweep.symbol_rate);
    disc_cfg.bind("seed", disc_opt.sweep.seed);
    disc_cfg.bind("out", disc_opt.sweep.out);
    disc_cfg.bind("amp-out", disc_opt.amp_out);
    disc_cfg.bind("channel", disc_opt.sweep.channel_csv);
    add_surface_options(disc, disc_opt.sweep.surface, disc_cfg);

    SolveMapOptions map_opt;
    auto* map_cmd = app.add_subcommand("solve-map", "solve the 16-QAM mapping under a profile");
    map_cmd->add_option("--config", config_path, "flat key=value config file");
    map_cmd->add_option("--profile", map_opt.profile,
                        "'ideal', 'triangular-3db', or a phase_rad,amplitude CSV");
    map_cmd->add_option("--order", map_opt.order, "harmonic order (>= 1)");
    map_cmd->add_option("--seed", map_opt.seed, "seed recorded in the output");
    map_cmd->add_option("--out", map_opt.out, "constellation CSV path");
    ConfigBinder map_cfg(map_cmd);
    map_cfg.bind("profile", map_opt.profile);
    map_cfg.bind("order", map_opt.order);
    map_cfg.bind("seed", map_opt.seed);
    map_cfg.bind("out", map_opt.out);

    BeamScanOptions beam_opt;
    auto* beam = app.add_subcommand("beam-scan", "beamforming gain versus array size");
    beam->add_option("--config", config_path, "flat key=value config file");
    beam->add_option("--nm-list", beam_opt.nm_list, "cell counts (perfect squares)")->delimiter(',');
    beam->add_option("--distance", beam_opt.distance, "receiver distance in meters");
    beam->add_option("--freq", beam_opt.carrier_freq, "carrier frequency in Hz");
    beam->add_option("--cell-size", beam_opt.cell_size, "cell width and length in meters");
    beam->add_option("--trials", beam_opt.trials, "random phase draws");
    beam->add_option("--seed", beam_opt.seed, "random seed");
    beam->add_option("--out", beam_opt.out, "output CSV path");
    ConfigBinder beam_cfg(beam);
    beam_cfg.bind("nm-list", beam_opt.nm_list);
    beam_cfg.bind("distance", beam_opt.distance);
    beam_cfg.bind("freq", beam_opt.carrier_freq);
    beam_cfg.bind("cell-size", beam_opt.cell_size);
    beam_cfg.bind("trials", beam_opt.trials);
    beam_cfg.bind("seed", beam_opt.seed);
    beam_cfg.bind("out", beam_opt.out);

    PredictOptions pred_opt;
    auto* pred = app.add_subcommand("predict", "theoretical ZF SNR and BER curves");
    pred->add_option("--config", config_path, "flat key=value config file");
    pred->add_option("--snr-db", pred_opt.snr_db_tokens, "SNR grid in dB")->delimiter(',');
    pred->add_option("--seed", pred_opt.seed, "random seed");
    pred->add_option("--out", pred_opt.out, "output CSV path");
    pred->add_option("--channel", pred_opt.channel_csv, "2x2 channel CSV");
    ConfigBinder pred_cfg(pred);
    pred_cfg.bind("snr-db", pred_opt.snr_db_tokens);
    pred_cfg.bind("seed", pred_opt.seed);
    pred_cfg.bind("out", pred_opt.out);
    pred_cfg.bind("channel", pred_opt.channel_csv);

    DumpOptions dump_opt;
    auto* dump = app.add_subcommand("dump-constellation", "recovered constellation dump");
    dump->add_option("--config", config_path, "flat key=value config file");
    dump->add_option("--snr-db", dump_opt.snr_db, "SNR in dB ('inf' for noiseless)");
    dump->add_option("--frames", dump_opt.frames, "frames to transmit");
    dump->add_option("--q", dump_opt.q, "discrete phase steps per symbol (0 = continuous)");
    dump->add_option("--seed", dump_opt.seed, "random seed");
    dump->add_option("--out", dump_opt.out, "output CSV path");
    dump->add_option("--channel", dump_opt.channel_csv, "2x2 channel CSV");
    dump->add_option("--payload", dump_opt.payload_file, "raw binary payload file");
    dump->add_option("--symbol-rate", dump_opt.symbol_rate, "symbols per second");
    ConfigBinder dump_cfg(dump);
    dump_cfg.bind("snr-db", dump_opt.snr_db);
    dump_cfg.bind("frames", dump_opt.frames);
    dump_cfg.bind("q", dump_opt.q);
    dump_cfg.bind("symbol-rate", dump_opt.symbol_rate);
    dump_cfg.bind("seed", dump_opt.seed);
    dump_cfg.bind("out", dump_opt.out);
    dump_cfg.bind("channel", dump_opt.channel_csv);
    dump_cfg.bind("payload", dump_opt.payload_file);
    add_surface_options(dump, dump_opt.surface, dump_cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (ber->parsed()) {
            ber_cfg.apply(config_path);
            return cmd_ber_sweep(ber_opt);
        }
        if (disc->parsed()) {
            disc_cfg.apply(config_path);
            return cmd_disc_sweep(disc_opt);
        }
        if (map_cmd->parsed()) {
            map_cfg.apply(config_path);
            return cmd_solve_map(map_opt);
        }
        if (beam->parsed()) {
            beam_cfg.apply(config_path);
            return cmd_beam_scan(beam_opt);
        }
        if (pred->parsed()) {
            pred_cfg.apply(config_path);
            return cmd_predict(pred_opt);
        }
        if (dump->parsed()) {
            dump_cfg.apply(config_path);
            return cmd_dump_constellation(dump_opt);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
