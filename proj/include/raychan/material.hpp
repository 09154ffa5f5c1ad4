// SPDX-License-Identifier: Apache-2.0
//
// raychan - deterministic image-method channel simulator and MIMO analysis toolkit
// Copyright (C) 2026 the raychan authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "raychan/geometry.hpp"

namespace raychan {

using cplx = std::complex<double>;

/// Frequency-dependent building material. Real relative permittivity follows
/// eps_r' = a * f_GHz^b and conductivity sigma = c * f_GHz^d [S/m]
/// (ITU-R P.2040 two-power-law form). scattering in [0, 1] is the fraction
/// of the reflected field diverted to diffuse scattering; 0 disables it.
struct Material {
    std::string name;
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double scattering = 0.0;

    void validate() const
    {
        if (a <= 0.0)
            throw std::invalid_argument("material '" + name + "': permittivity constant a must be > 0");
        if (c < 0.0)
            throw std::invalid_argument("material '" + name + "': conductivity constant c must be >= 0");
        if (scattering < 0.0 || scattering > 1.0)
            throw std::invalid_argument("material '" + name + "': scattering coefficient must be in [0, 1]");
    }
};

/// Complex relative permittivity eps = eps_r' - j * sigma / (2 pi f eps0).
/// Time convention e^{+j omega t}: losses make the imaginary part negative.
/// Valid for f in [1, 100] GHz.
inline cplx complex_permittivity(const Material &m, double f_hz)
{
    if (!(f_hz >= 1e9 && f_hz <= 100e9))
        throw std::domain_error("complex_permittivity: frequency " + std::to_string(f_hz) +
                                " Hz outside supported range [1, 100] GHz");
    const double f_ghz = f_hz * 1e-9;
    const double eps_re = m.a * std::pow(f_ghz, m.b);
    const double sigma = m.c * std::pow(f_ghz, m.d);
    const double eps_im = sigma / (2.0 * kPi * f_hz * kVacuumPermittivity);
    return {eps_re, -eps_im};
}

enum class Polarization { TE, TM };

/// Fresnel reflection coefficient for a ray in vacuum hitting a half-space of
/// relative permittivity eps, at the given incidence angle from the normal.
/// Sign convention: both polarizations tend to (1 - sqrt(eps))/(1 + sqrt(eps))
/// at normal incidence, and to -1 in the PEC limit.
inline cplx fresnel_reflection(cplx eps, double incidence_angle, Polarization pol)
{
    const double ct = std::cos(incidence_angle);
    const double st = std::sin(incidence_angle);
    const cplx w = std::sqrt(eps - st * st); // principal branch: Re >= 0, losses Im <= 0
    if (pol == Polarization::TE)
        return (ct - w) / (ct + w);
    return (w - eps * ct) / (w + eps * ct);
}

/// Built-in material table.
/// Constants follow the ITU-R P.2040 building-material power laws; named after
/// the surfaces they model. Override via configuration where needed.
inline const std::vector<Material> &builtin_materials()
{
    static const std::vector<Material> table = {
        {"glass", 6.31, 0.0, 0.0036, 1.3394, 0.0},
        {"plasterboard", 2.73, 0.0, 0.0085, 0.9395, 0.0},
        {"wood", 1.99, 0.0, 0.0047, 1.0718, 0.0},
        {"metal", 1.0, 0.0, 1e7, 0.0, 0.0},
        {"plywood", 2.71, 0.0, 0.33, 0.0, 0.0},
        {"ceiling_board", 1.48, 0.0, 0.0011, 1.0750, 0.0},
        {"concrete", 5.24, 0.0, 0.0462, 0.7822, 0.0},
        {"brick", 3.91, 0.0, 0.0238, 0.16, 0.0},
        {"marble", 7.074, 0.0, 0.0055, 0.9262, 0.0},
    };
    return table;
}

inline const Material &builtin_material(const std::string &name)
{
    for (const Material &m : builtin_materials())
        if (m.name == name)
            return m;
    throw std::invalid_argument("unknown material '" + name + "'");
}

} // namespace raychan
