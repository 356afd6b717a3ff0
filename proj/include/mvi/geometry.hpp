#pragma once

#include "mvi/grid.hpp"

#include <cstddef>

namespace mvi {

// Source/target/receiver layout of the coincidence imaging system. All
// lengths in metres, angles in radians.
struct SystemGeometry {
    double wavelength = 1550e-9;
    double z1 = 10.0;         // source plane -> target plane
    double z2 = 10.0;         // target plane -> receiver
    double zd = 10.0;         // radar -> target centre
    double aperture = 0.0;    // equivalent transmitter aperture D
    double alpha = 0.0;       // radar azimuth
    double beta = 0.0;        // radar elevation
    double receiver_x = 0.0;  // receiver transverse offset on the source plane

    double wavenumber() const noexcept;

    void validate() const;

    bool operator==(const SystemGeometry&) const = default;
};

// Cell pitch at which a side x side grid is exactly resolved: the
// sinc PSF first zero lambda*Z1/D equals one cell when D = side * pitch.
double ideal_pitch(double wavelength, double z1, std::size_t side);

// Geometry with Z1 = Z2 = Zd = distance and D = side * ideal_pitch.
SystemGeometry ideal_geometry(double wavelength, double distance, std::size_t side);

// exp(j * 2*pi * factor * length / wavelength), reduced modulo one cycle
// before the trigonometric call so long paths keep full phase accuracy.
cplx path_phasor(double length, double wavelength, double factor = 1.0);

} // namespace mvi
