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
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "raychan/array.hpp"
#include "raychan/tracer.hpp"

namespace raychan {

/// MIMO channel impulse response. Tap delays are shared across element pairs
/// (far-field assumption); amplitudes are stored tap-major:
/// amp(l, r, t) = amps[(l * n_rx + r) * n_tx + t].
struct Cir {
    std::vector<double> delays; // sorted ascending
    std::vector<cplx> amps;
    int n_rx = 1;
    int n_tx = 1;

    std::size_t n_taps() const { return delays.size(); }

    cplx amp(std::size_t l, int r, int t) const
    {
        return amps[(l * static_cast<std::size_t>(n_rx) + static_cast<std::size_t>(r)) *
                        static_cast<std::size_t>(n_tx) +
                    static_cast<std::size_t>(t)];
    }
};

/// Per-subcarrier MIMO channel matrices H[k], k-major storage:
/// at(k, r, t) = h[(k * n_rx + r) * n_tx + t].
struct MimoChannel {
    std::vector<cplx> h;
    int n_f = 0;
    int n_rx = 1;
    int n_tx = 1;
    double f_c = 0.0;
    double bandwidth = 0.0;
    double subcarrier_spacing = 0.0;

    cplx at(int k, int r, int t) const
    {
        return h[(static_cast<std::size_t>(k) * static_cast<std::size_t>(n_rx) +
                  static_cast<std::size_t>(r)) *
                     static_cast<std::size_t>(n_tx) +
                 static_cast<std::size_t>(t)];
    }

    cplx *subcarrier(int k)
    {
        return h.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(n_rx) *
                              static_cast<std::size_t>(n_tx);
    }
    const cplx *subcarrier(int k) const
    {
        return h.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(n_rx) *
                              static_cast<std::size_t>(n_tx);
    }

    double frobenius_sq(int k) const
    {
        const cplx *m = subcarrier(k);
        double s = 0.0;
        const std::size_t n = static_cast<std::size_t>(n_rx) * static_cast<std::size_t>(n_tx);
        for (std::size_t i = 0; i < n; ++i)
            s += std::norm(m[i]);
        return s;
    }
};

/// Per element pair (r, t), the tap of path l is
/// gain_l * s_rx[r](aoa_l) * s_tx[t](aod_l); delays are shared.
inline Cir synthesize(const std::vector<Path> &paths, const ArrayConfig &tx_array,
                      const ArrayConfig &rx_array, double f_c)
{
    if (paths.empty())
        throw std::invalid_argument("synthesize: empty path list");
    tx_array.validate();
    rx_array.validate();

    std::vector<std::size_t> order(paths.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return paths[a].delay < paths[b].delay; });

    Cir cir;
    cir.n_rx = rx_array.size();
    cir.n_tx = tx_array.size();
    cir.delays.reserve(paths.size());
    cir.amps.resize(paths.size() * static_cast<std::size_t>(cir.n_rx) *
                    static_cast<std::size_t>(cir.n_tx));
    std::size_t li = 0;
    for (std::size_t oi : order) {
        const Path &p = paths[oi];
        cir.delays.push_back(p.delay);
        const auto s_rx = steering_vector(rx_array, p.aoa, f_c);
        const auto s_tx = steering_vector(tx_array, p.aod, f_c);
        for (int r = 0; r < cir.n_rx; ++r)
            for (int t = 0; t < cir.n_tx; ++t)
                cir.amps[(li * static_cast<std::size_t>(cir.n_rx) + static_cast<std::size_t>(r)) *
                             static_cast<std::size_t>(cir.n_tx) +
                         static_cast<std::size_t>(t)] =
                    p.gain * s_rx[static_cast<std::size_t>(r)] * s_tx[static_cast<std::size_t>(t)];
        ++li;
    }
    return cir;
}

/// OFDM channel frequency response on N_f = bandwidth / subcarrier_spacing
/// subcarriers centered on f_c. Tap gains already carry the carrier phase
/// reference, so each tap rotates by the subcarrier offset from f_c:
/// H[k] = sum_l a_l e^{-j 2 pi (f_k - f_c) tau_l},  f_k = f_c - BW/2 + (k + 1/2) df.
inline MimoChannel cfr(const Cir &cir, double f_c, double bandwidth, double subcarrier_spacing)
{
    if (!(subcarrier_spacing > 0.0) || !(bandwidth > 0.0))
        throw std::invalid_argument("cfr: bandwidth and subcarrier spacing must be > 0");
    const double nf_real = bandwidth / subcarrier_spacing;
    const int n_f = static_cast<int>(std::llround(nf_real));
    if (n_f < 1 || std::abs(nf_real - n_f) > 1e-9 * nf_real)
        throw std::invalid_argument("cfr: bandwidth / subcarrier_spacing must be a positive integer");

    MimoChannel ch;
    ch.n_f = n_f;
    ch.n_rx = cir.n_rx;
    ch.n_tx = cir.n_tx;
    ch.f_c = f_c;
    ch.bandwidth = bandwidth;
    ch.subcarrier_spacing = subcarrier_spacing;
    const std::size_t pairs = static_cast<std::size_t>(cir.n_rx) * static_cast<std::size_t>(cir.n_tx);
    ch.h.assign(static_cast<std::size_t>(n_f) * pairs, cplx{0.0, 0.0});
    for (int k = 0; k < n_f; ++k) {
        const double offset = -bandwidth / 2.0 + (k + 0.5) * subcarrier_spacing;
        cplx *hk = ch.subcarrier(k);
        for (std::size_t l = 0; l < cir.n_taps(); ++l) {
            const cplx rot = std::polar(1.0, -2.0 * kPi * offset * cir.delays[l]);
            const cplx *al = cir.amps.data() + l * pairs;
            for (std::size_t i = 0; i < pairs; ++i)
                hk[i] += al[i] * rot;
        }
    }
    return ch;
}

inline MimoChannel cfr(const std::vector<Path> &paths, const ArrayConfig &tx_array,
                       const ArrayConfig &rx_array, double f_c, double bandwidth,
                       double subcarrier_spacing)
{
    return cfr(synthesize(paths, tx_array, rx_array, f_c), f_c, bandwidth, subcarrier_spacing);
}

/// Power-delay profile: |amplitude|^2 accumulated into fixed-width delay bins
/// starting at zero delay. Taps beyond the last bin fold into it so the total
/// power is conserved.
inline std::vector<double> pdp(std::span<const double> delays, std::span<const cplx> amps,
                               int num_bins, double bin_width)
{
    if (!(bin_width > 0.0) || num_bins < 1)
        throw std::invalid_argument("pdp: need bin_width > 0 and num_bins >= 1");
    std::vector<double> bins(static_cast<std::size_t>(num_bins), 0.0);
    for (std::size_t i = 0; i < delays.size(); ++i) {
        int b = static_cast<int>(delays[i] / bin_width);
        b = std::clamp(b, 0, num_bins - 1);
        bins[static_cast<std::size_t>(b)] += std::norm(amps[i]);
    }
    return bins;
}

/// PDP of a full CIR (power summed over all element pairs).
inline std::vector<double> pdp(const Cir &cir, int num_bins, double bin_width)
{
    if (!(bin_width > 0.0) || num_bins < 1)
        throw std::invalid_argument("pdp: need bin_width > 0 and num_bins >= 1");
    std::vector<double> bins(static_cast<std::size_t>(num_bins), 0.0);
    const std::size_t pairs = static_cast<std::size_t>(cir.n_rx) * static_cast<std::size_t>(cir.n_tx);
    for (std::size_t l = 0; l < cir.n_taps(); ++l) {
        int b = static_cast<int>(cir.delays[l] / bin_width);
        b = std::clamp(b, 0, num_bins - 1);
        double power = 0.0;
        for (std::size_t i = 0; i < pairs; ++i)
            power += std::norm(cir.amps[l * pairs + i]);
        bins[static_cast<std::size_t>(b)] += power;
    }
    return bins;
}

} // namespace raychan
