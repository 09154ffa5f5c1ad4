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

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "raychan/geometry.hpp"
#include "raychan/material.hpp"

namespace raychan {

enum class ElementPattern { Isotropic, Tr38901 };

inline double half_wavelength(double f_hz) { return 0.5 * kSpeedOfLight / f_hz; }

/// Uniform planar array in the local y-z plane, boresight along local x.
/// Element n = row * cols + col sits at local (0, col * spacing, row * spacing),
/// element 0 at the array reference point. Vertical polarization throughout.
struct ArrayConfig {
    int rows = 1;
    int cols = 1;
    double spacing = 0.0; // meters; typically half_wavelength(f_c)
    ElementPattern pattern = ElementPattern::Isotropic;
    double boresight_az = 0.0; // radians
    double boresight_el = 0.0;

    int size() const { return rows * cols; }

    void validate() const
    {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("ArrayConfig: rows and cols must be >= 1");
        if (!(spacing > 0.0))
            throw std::invalid_argument("ArrayConfig: element spacing must be > 0");
    }

    Vec3 local_position(int n) const
    {
        const int r = n / cols;
        const int c = n % cols;
        return {0.0, c * spacing, r * spacing};
    }

    /// Columns of the local frame expressed in global coordinates.
    void frame(Vec3 &x_l, Vec3 &y_l, Vec3 &z_l) const
    {
        x_l = unit_from_azel(boresight_az, boresight_el);
        y_l = {-std::sin(boresight_az), std::cos(boresight_az), 0.0};
        z_l = cross(x_l, y_l);
    }
};

inline ArrayConfig make_upa(int rows, int cols, double f_hz,
                            ElementPattern pattern = ElementPattern::Isotropic)
{
    ArrayConfig a;
    a.rows = rows;
    a.cols = cols;
    a.spacing = half_wavelength(f_hz);
    a.pattern = pattern;
    return a;
}

/// TR 38.901 single-element power pattern in dB. theta_deg is the zenith
/// angle in the element frame (boresight at 90), phi_deg the azimuth
/// (boresight at 0). Constants: 65 deg beamwidths, 30 dB floors, 8 dBi peak.
inline double element_gain_tr38901_db(double theta_deg, double phi_deg)
{
    const double theta_3db = 65.0, phi_3db = 65.0;
    const double sla_v = 30.0, a_m = 30.0, g_max = 8.0;
    const double a_v = std::min(12.0 * std::pow((theta_deg - 90.0) / theta_3db, 2.0), sla_v);
    const double a_h = std::min(12.0 * std::pow(phi_deg / phi_3db, 2.0), a_m);
    return g_max - std::min(a_v + a_h, a_m);
}

/// Element field amplitude for a global look direction, in the array frame.
inline double element_amplitude(const ArrayConfig &array, const Vec3 &unit_dir)
{
    if (array.pattern == ElementPattern::Isotropic)
        return 1.0;
    Vec3 x_l, y_l, z_l;
    array.frame(x_l, y_l, z_l);
    const double lx = dot(unit_dir, x_l);
    const double ly = dot(unit_dir, y_l);
    const double lz = dot(unit_dir, z_l);
    const double theta_deg = std::acos(std::clamp(lz, -1.0, 1.0)) * 180.0 / kPi;
    const double phi_deg = std::atan2(ly, lx) * 180.0 / kPi;
    return std::pow(10.0, element_gain_tr38901_db(theta_deg, phi_deg) / 20.0);
}

/// Steering vector toward the given look direction at frequency f. Element n
/// carries phase e^{-j 2 pi (f/c) <p_n, u>} times the element amplitude.
inline std::vector<cplx> steering_vector(const ArrayConfig &array, const AzEl &direction,
                                         double f_hz)
{
    array.validate();
    const Vec3 u = unit_from_azel(direction);
    Vec3 x_l, y_l, z_l;
    array.frame(x_l, y_l, z_l);
    const double amp = element_amplitude(array, u);
    const double k = 2.0 * kPi * f_hz / kSpeedOfLight;
    std::vector<cplx> s(static_cast<std::size_t>(array.size()));
    for (int n = 0; n < array.size(); ++n) {
        const Vec3 pl = array.local_position(n);
        const Vec3 pg = x_l * pl.x + y_l * pl.y + z_l * pl.z;
        s[static_cast<std::size_t>(n)] = amp * std::polar(1.0, -k * dot(pg, u));
    }
    return s;
}

} // namespace raychan
