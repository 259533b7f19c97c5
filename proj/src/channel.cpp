#include "rismimo/channel.hpp"

#include <algorithm>
#include <tuple>

#include "rismimo/csvio.hpp"

namespace rismimo {

void LinkGeometry::validate() const {
    if (distance <= 0.0) throw std::domain_error("LinkGeometry: distance must be positive");
    if (aod_theta < 0.0 || aod_theta > kPi / 2 + 1e-12 || aoa_theta < 0.0 ||
        aoa_theta > kPi / 2 + 1e-12)
        throw std::domain_error("LinkGeometry: elevation outside [0, pi/2]");
}

ChannelMatrix ChannelMatrix::zeros(std::size_t rows, std::size_t cols) {
    ChannelMatrix h;
    h.rows = rows;
    h.cols = cols;
    h.entries.assign(rows * cols, cdouble{0.0, 0.0});
    return h;
}

Vec3 cell_position(const RisGeometry& geom, int n, int m) {
    return {(m - 0.5 * (geom.cols - 1)) * geom.cell_width,
            (n - 0.5 * (geom.rows - 1)) * geom.cell_length, 0.0};
}

LinkGeometry link_between(const RisGeometry& geom, int n, int m, const Vec3& antenna_pos) {
    const Vec3 cell = cell_position(geom, n, m);
    const double dx = antenna_pos.x - cell.x;
    const double dy = antenna_pos.y - cell.y;
    const double dz = antenna_pos.z - cell.z;
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (d == 0.0) throw std::domain_error("link_between: antenna coincides with cell");
    LinkGeometry link;
    link.distance = d;
    link.aod_theta = std::acos(std::clamp(dz / d, -1.0, 1.0));
    link.aod_phi = wrap_phase(std::atan2(dy, dx));
    // boresight -z: the antenna looks back at the surface
    link.aoa_theta = std::acos(std::clamp(dz / d, -1.0, 1.0));
    link.aoa_phi = wrap_phase(std::atan2(-dy, -dx));
    return link;
}

cdouble free_space_channel(const RisGeometry& geom, const RxAntennaConfig& rx,
                           const LinkGeometry& link) {
    if (link.distance <= 0.0) throw std::domain_error("free_space_channel: singular geometry, d = 0");
    const double lambda = geom.wavelength();
    const double f_tx = geom.pattern(link.aod_theta, link.aod_phi);
    const double f_rx = rx.pattern(link.aoa_theta, link.aoa_phi);
    const double mag = std::sqrt(geom.cell_gain * rx.gain * lambda * lambda * f_tx * f_rx) /
                       (4.0 * kPi * link.distance);
    return std::polar(mag, -kTwoPi * link.distance / lambda);
}

std::vector<cdouble> received_signal(const RisGeometry& geom,
                                              const std::vector<ReflectionCoefficient>& gammas,
                                              const std::vector<RxAntennaConfig>& antennas,
                                              double flux,
                                              const std::vector<std::vector<LinkGeometry>>& links) {
    geom.validate();
    const std::size_t cells = static_cast<std::size_t>(geom.rows) * geom.cols;
    if (gammas.size() != cells)
        throw std::invalid_argument("received_signal: one Gamma per cell required");
    if (links.size() != antennas.size())
        throw std::invalid_argument("received_signal: one link row per antenna required");
    const double amp = std::sqrt(flux * geom.cell_width * geom.cell_length);
    std::vector<cdouble> y(antennas.size());
    for (std::size_t k = 0; k < antennas.size(); ++k) {
        if (links[k].size() != cells)
            throw std::invalid_argument("received_signal: one link per cell required");
        cdouble acc{0.0, 0.0};
        for (std::size_t c = 0; c < cells; ++c)
            acc += free_space_channel(geom, antennas[k], links[k][c]) * gammas[c].value();
        y[k] = acc * amp;
    }
    return y;
}

ChannelMatrix free_space_channel_matrix(const RisGeometry& geom,
                                        const std::vector<RxAntennaConfig>& antennas,
                                        double flux) {
    geom.validate();
    const std::size_t cells = static_cast<std::size_t>(geom.rows) * geom.cols;
    ChannelMatrix h = ChannelMatrix::zeros(antennas.size(), cells);
    h.flux = flux;
    h.cell_power = flux * geom.cell_width * geom.cell_length;
    for (std::size_t k = 0; k < antennas.size(); ++k)
        for (int n = 0; n < geom.rows; ++n)
            for (int m = 0; m < geom.cols; ++m)
                h.at(k, static_cast<std::size_t>(n) * geom.cols + m) =
                    free_space_channel(geom, antennas[k], link_between(geom, n, m, antennas[k].position));
    return h;
}

std::vector<cdouble> flat_fading_transmit(const ChannelMatrix& h, const std::vector<cdouble>& x,
                                          double p, double noise_sigma2, RandomStream& rng) {
    if (x.size() != h.cols)
        throw std::invalid_argument("flat_fading_transmit: input dimension mismatch");
    if (p < 0.0 || noise_sigma2 < 0.0)
        throw std::invalid_argument("flat_fading_transmit: p and sigma^2 must be non-negative");
    const double sqrt_p = std::sqrt(p);
    std::vector<cdouble> y(h.rows);
    for (std::size_t r = 0; r < h.rows; ++r) {
        cdouble acc{0.0, 0.0};
        for (std::size_t c = 0; c < h.cols; ++c) acc += h.at(r, c) * x[c];
        y[r] = sqrt_p * acc + rng.complex_normal(noise_sigma2);
    }
    return y;
}

BeamformingMatrix beamforming_matrix(const std::vector<double>& distances, double wavelength) {
    if (wavelength <= 0.0) throw std::invalid_argument("beamforming_matrix: wavelength must be positive");
    BeamformingMatrix b;
    b.phases.reserve(distances.size());
    for (double d : distances) b.phases.push_back(wrap_phase(kTwoPi * d / wavelength));
    return b;
}

Mat2 random_channel_2x2(RandomStream& rng) {
    return Mat2{rng.complex_normal(1.0), rng.complex_normal(1.0), rng.complex_normal(1.0),
                rng.complex_normal(1.0)};
}

void write_channel_csv(const std::string& path, const ChannelMatrix& h, std::uint64_t seed) {
    CsvWriter w(path, {"row", "col", "re", "im"});
    for (std::size_t r = 0; r < h.rows; ++r)
        for (std::size_t c = 0; c < h.cols; ++c)
            w.write_row({CsvWriter::fmt_int(static_cast<long long>(r)),
                         CsvWriter::fmt_int(static_cast<long long>(c)),
                         CsvWriter::fmt(h.at(r, c).real()), CsvWriter::fmt(h.at(r, c).imag())});
    w.finish(seed);
}

ChannelMatrix read_channel_csv(const std::string& path) {
    CsvReader r(path);
    r.expect_header({"row", "col", "re", "im"});
    std::vector<std::string> row;
    std::vector<std::tuple<std::size_t, std::size_t, cdouble>> cells;
    std::size_t max_r = 0, max_c = 0;
    while (r.next_row(row)) {
        if (row.size() != 4) throw std::invalid_argument("channel csv: expected 4 columns in " + path);
        const std::size_t rr = std::stoul(row[0]);
        const std::size_t cc = std::stoul(row[1]);
        cells.emplace_back(rr, cc, cdouble(std::stod(row[2]), std::stod(row[3])));
        max_r = std::max(max_r, rr);
        max_c = std::max(max_c, cc);
    }
    if (cells.empty()) throw std::invalid_argument("channel csv: no entries in " + path);
    ChannelMatrix h = ChannelMatrix::zeros(max_r + 1, max_c + 1);
    for (const auto& [rr, cc, v] : cells) h.at(rr, cc) = v;
    return h;
}

std::vector<Vec3> read_positions_csv(const std::string& path) {
    CsvReader r(path);
    r.expect_header({"x", "y", "z"});
    std::vector<Vec3> out;
    std::vector<std::string> row;
    while (r.next_row(row)) {
        if (row.size() != 3) throw std::invalid_argument("positions csv: expected 3 columns in " + path);
        out.push_back({std::stod(row[0]), std::stod(row[1]), std::stod(row[2])});
    }
    return out;
}

void write_positions_csv(const std::string& path, const std::vector<Vec3>& positions,
                         std::uint64_t seed) {
    CsvWriter w(path, {"x", "y", "z"});
    for (const auto& p : positions)
        w.write_row({CsvWriter::fmt(p.x), CsvWriter::fmt(p.y), CsvWriter::fmt(p.z)});
    w.finish(seed);
}

}  // namespace rismimo
