#pragma once

#include <string>
#include <vector>

#include "rismimo/mathutil.hpp"
#include "rismimo/ris_core.hpp"
#include "rismimo/rng.hpp"

namespace rismimo {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct RxAntennaConfig {
    double gain = 1.0;  // G_r, linear
    PatternFn pattern = isotropic_pattern();
    Vec3 position{};
};

// Propagation geometry of one (unit cell, receive antenna) pair.
// Elevations are measured from the surface normal (+z for cells) and
// from the antenna boresight (-z, the antenna faces the surface).
struct LinkGeometry {
    double distance = 0.0;    // meters
    double aod_theta = 0.0;   // departure elevation, [0, pi/2]
    double aod_phi = 0.0;     // departure azimuth, [0, 2*pi)
    double aoa_theta = 0.0;   // arrival elevation, [0, pi/2]
    double aoa_phi = 0.0;     // arrival azimuth, [0, 2*pi)

    void validate() const;
};

// Flat-fading gains between transmit elements and receive antennas,
// row per antenna. cell_power = flux * d_x * d_y when built from
// geometry; defaults to 1 for abstract channels.
struct ChannelMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cdouble> entries;
    double cell_power = 1.0;  // p, watts
    double flux = 0.0;        // S, W/m^2 (0 when not geometry-derived)

    static ChannelMatrix zeros(std::size_t rows, std::size_t cols);
    cdouble& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
    const cdouble& at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

// Diagonal unit-modulus transmit phasing, one phase per unit cell in
// row-major (n, m) order.
struct BeamformingMatrix {
    std::vector<double> phases;  // radians, [0, 2*pi)
};

// Position of cell (n, m), 0-based, on the z = 0 plane with the array
// centered at the origin.
Vec3 cell_position(const RisGeometry& geom, int n, int m);

// Distance and angles for one cell/antenna pair under the coordinate
// convention above.
LinkGeometry link_between(const RisGeometry& geom, int n, int m, const Vec3& antenna_pos);

// Free-space gain between one unit cell and one antenna:
//   sqrt(G * G_r * lambda^2 * F(AoD) * F_rx(AoA)) / (4*pi*d) * exp(-j*2*pi*d/lambda)
// Throws std::domain_error at d = 0.
cdouble free_space_channel(const RisGeometry& geom, const RxAntennaConfig& rx,
                           const LinkGeometry& link);

// Per-antenna baseband envelope of the reflected carrier:
//   y_k = sum_cells h_k(cell) * sqrt(S*d_x*d_y) * Gamma(cell)
// gammas and each links row are row-major over (n, m); one links row
// per antenna. Throws std::invalid_argument on shape mismatches.
std::vector<cdouble> received_signal(const RisGeometry& geom,
                                              const std::vector<ReflectionCoefficient>& gammas,
                                              const std::vector<RxAntennaConfig>& antennas,
                                              double flux,
                                              const std::vector<std::vector<LinkGeometry>>& links);

// Full K x (N*M) free-space channel from geometry.
ChannelMatrix free_space_channel_matrix(const RisGeometry& geom,
                                        const std::vector<RxAntennaConfig>& antennas,
                                        double flux);

// y = sqrt(p) * H * x + n with n i.i.d. circularly-symmetric complex
// Gaussian of per-component variance noise_sigma2, drawn from rng.
std::vector<cdouble> flat_fading_transmit(const ChannelMatrix& h, const std::vector<cdouble>& x,
                                          double p, double noise_sigma2, RandomStream& rng);

// Co-phasing transmit matrix for one target antenna: phase(cell) =
// +2*pi*d(cell)/lambda mod 2*pi, cancelling the propagation phase.
BeamformingMatrix beamforming_matrix(const std::vector<double>& distances, double wavelength);

// i.i.d. CN(0,1) aggregated 2x2 channel, fixed by the stream state.
Mat2 random_channel_2x2(RandomStream& rng);

void write_channel_csv(const std::string& path, const ChannelMatrix& h, std::uint64_t seed);
ChannelMatrix read_channel_csv(const std::string& path);

// Antenna position list, CSV columns x,y,z (meters).
std::vector<Vec3> read_positions_csv(const std::string& path);
void write_positions_csv(const std::string& path, const std::vector<Vec3>& positions,
                         std::uint64_t seed);

}  // namespace rismimo
