#include "mvi/geometry.hpp"

#include "mvi/errors.hpp"

#include <cmath>
#include <numbers>

namespace mvi {

double SystemGeometry::wavenumber() const noexcept
{
    return 2.0 * std::numbers::pi / wavelength;
}

void SystemGeometry::validate() const
{
    require(wavelength > 0.0 && std::isfinite(wavelength), "wavelength must be positive");
    require(z1 > 0.0 && z2 > 0.0 && zd > 0.0, "path lengths Z1, Z2, Zd must be positive");
    require(aperture >= 0.0, "aperture must be non-negative");
}

double ideal_pitch(double wavelength, double z1, std::size_t side)
{
    require(wavelength > 0.0 && z1 > 0.0 && side >= 1, "ideal_pitch needs positive wavelength, Z1 and side");
    return std::sqrt(wavelength * z1 / static_cast<double>(side));
}

SystemGeometry ideal_geometry(double wavelength, double distance, std::size_t side)
{
    SystemGeometry g;
    g.wavelength = wavelength;
    g.z1 = g.z2 = g.zd = distance;
    g.aperture = static_cast<double>(side) * ideal_pitch(wavelength, distance, side);
    g.validate();
    return g;
}

cplx path_phasor(double length, double wavelength, double factor)
{
    double cycles = factor * length / wavelength;
    double frac = cycles - std::floor(cycles);
    return std::polar(1.0, 2.0 * std::numbers::pi * frac);
}

} // namespace mvi
