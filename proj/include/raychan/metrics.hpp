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
#include <limits>
#include <stdexcept>
#include <vector>

#include "raychan/tracer.hpp"

namespace raychan {

/// Propagation statistics of one Tx-Rx realization, computed on the
/// dynamic-range-filtered single-antenna path list. K-factor is +inf for
/// LoS-only channels and -inf when no LoS path exists.
struct ChannelStats {
    double k_factor_db = 0.0;
    double rms_ds = 0.0; // seconds
    double asa = 0.0;    // degrees
    int mpc_count = 0;
    bool los_present = false;
};

/// Rician K-factor: LoS power over aggregate NLoS power, in dB.
inline double k_factor_db(const std::vector<Path> &paths)
{
    if (paths.empty())
        throw std::invalid_argument("k_factor_db: empty path list");
    double p_los = 0.0, p_nlos = 0.0;
    for (const Path &p : paths)
        (p.kind == PathKind::LoS ? p_los : p_nlos) += std::norm(p.gain);
    if (p_los == 0.0)
        return -std::numeric_limits<double>::infinity();
    if (p_nlos == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(p_los / p_nlos);
}

/// Power-weighted second central moment of delay.
inline double rms_delay_spread(std::span<const double> delays, std::span<const double> powers)
{
    if (delays.empty() || delays.size() != powers.size())
        throw std::invalid_argument("rms_delay_spread: empty or mismatched inputs");
    double psum = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < delays.size(); ++i) {
        psum += powers[i];
        m1 += powers[i] * delays[i];
        m2 += powers[i] * delays[i] * delays[i];
    }
    if (psum <= 0.0)
        throw std::invalid_argument("rms_delay_spread: total power is zero");
    const double mean = m1 / psum;
    return std::sqrt(std::max(0.0, m2 / psum - mean * mean));
}

inline double rms_delay_spread(const std::vector<Path> &paths)
{
    std::vector<double> d, p;
    d.reserve(paths.size());
    p.reserve(paths.size());
    for (const Path &path : paths) {
        d.push_back(path.delay);
        p.push_back(std::norm(path.gain));
    }
    return rms_delay_spread(d, p);
}

/// Circular azimuth angular spread of arrival in degrees:
/// sqrt(-2 ln |sum_l p_l e^{j phi_l} / sum_l p_l|). Rotation-invariant.
inline double asa_deg(const std::vector<Path> &paths)
{
    if (paths.empty())
        throw std::invalid_argument("asa_deg: empty path list");
    cplx resultant{0.0, 0.0};
    double psum = 0.0;
    for (const Path &p : paths) {
        const double power = std::norm(p.gain);
        resultant += power * std::polar(1.0, p.aoa.az);
        psum += power;
    }
    if (psum <= 0.0)
        throw std::invalid_argument("asa_deg: total power is zero");
    const double r = std::min(1.0, std::abs(resultant) / psum);
    const double sigma_rad = std::sqrt(std::max(0.0, -2.0 * std::log(r)));
    return sigma_rad * 180.0 / kPi;
}

/// Cardinality of the (already filtered) path list.
inline int mpc_count(const std::vector<Path> &paths)
{
    return static_cast<int>(paths.size());
}

inline ChannelStats compute_stats(const std::vector<Path> &paths)
{
    ChannelStats s;
    s.k_factor_db = k_factor_db(paths);
    s.rms_ds = rms_delay_spread(paths);
    s.asa = asa_deg(paths);
    s.mpc_count = mpc_count(paths);
    s.los_present = std::any_of(paths.begin(), paths.end(),
                                [](const Path &p) { return p.kind == PathKind::LoS; });
    return s;
}

/// Right-continuous empirical CDF: sorted values with probabilities i/n.
inline std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("empirical_cdf: empty input");
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(values.size());
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        cdf.emplace_back(values[i], static_cast<double>(i + 1) / n);
    return cdf;
}

} // namespace raychan
