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

#include <string>
#include <vector>

#include "raychan/csv.hpp"
#include "raychan/metrics.hpp"
#include "raychan/mimo.hpp"

namespace raychan {

/// Antenna elements per side for a square aperture of side length L at
/// half-wavelength spacing: floor(L / (lambda/2)) + 1. Sub-lambda/2 apertures
/// collapse to a single element.
inline int elements_per_side(double aperture_m, double f_hz)
{
    if (!(aperture_m >= 0.0))
        throw std::invalid_argument("elements_per_side: aperture must be >= 0");
    return static_cast<int>(std::floor(aperture_m / half_wavelength(f_hz))) + 1;
}

struct SweepPoint {
    double f_c = 0.0;
    int n_tx = 0;
    int n_rx = 0;
    double aperture_m = 0.0;
    double mean_rank = 0.0;
    double mean_cond_db = 0.0;
    double se_bps_hz = 0.0;
    double eta_db = 0.0;
};

struct SweepChannelParams {
    double bandwidth = 102.4e6;
    double subcarrier_spacing = 400e3;
    ElementPattern pattern = ElementPattern::Tr38901;
};

namespace detail {

/// Shared pipeline of both scaling laws: per (frequency, Tx side) run
/// trace -> synthesize -> cfr -> metrics for every Rx and average.
inline std::vector<SweepPoint> sweep_impl(const Scene &scene, const Vec3 &tx,
                                          const std::vector<Vec3> &rx_set,
                                          const std::vector<double> &frequencies,
                                          const std::vector<std::pair<int, double>> &sides,
                                          int rx_side, const EvalConfig &eval_cfg,
                                          const TraceConfig &trace_cfg,
                                          const SweepChannelParams &chan, bool fixed_aperture)
{
    if (rx_set.empty())
        throw std::invalid_argument("sweep: need at least one rx location");
    std::vector<SweepPoint> table;
    ImageTracer tracer(scene, tx, trace_cfg.max_reflection_order);
    const Vec3 center = scene.bounds.center();
    for (double f : frequencies) {
        // Geometry is frequency-independent; reuse it per receiver.
        std::vector<std::vector<raychan::detail::PathGeometry>> geoms;
        geoms.reserve(rx_set.size());
        for (const Vec3 &rx : rx_set)
            geoms.push_back(tracer.trace_geometry(rx));

        for (const auto &[side, aperture] : sides) {
            const int n_side = fixed_aperture ? elements_per_side(aperture, f) : side;
            SweepPoint pt;
            pt.f_c = f;
            pt.n_tx = n_side * n_side;
            pt.n_rx = rx_side * rx_side;
            pt.aperture_m = fixed_aperture ? aperture : (n_side - 1) * half_wavelength(f);
            double rank = 0.0, cond = 0.0, se = 0.0, eta_db = 0.0;
            int n_ok = 0;
            for (std::size_t ri = 0; ri < rx_set.size(); ++ri) {
                TraceConfig cfg = trace_cfg;
                cfg.frequency = f;
                auto paths = tracer.evaluate(geoms[ri], cfg);
                if (paths.empty())
                    continue;
                paths = dynamic_range_filter(std::move(paths), cfg.dynamic_range_db);

                ArrayConfig tx_array = make_upa(n_side, n_side, f, chan.pattern);
                ArrayConfig rx_array = make_upa(rx_side, rx_side, f, chan.pattern);
                const AzEl tx_look = azel_of(normalized(center - tx));
                const AzEl rx_look = azel_of(normalized(tx - rx_set[ri]));
                tx_array.boresight_az = tx_look.az;
                tx_array.boresight_el = tx_look.el;
                rx_array.boresight_az = rx_look.az;
                rx_array.boresight_el = rx_look.el;

                const MimoChannel ch =
                    cfr(paths, tx_array, rx_array, f, chan.bandwidth, chan.subcarrier_spacing);
                const MimoMetrics m = evaluate_mimo(ch, eval_cfg);
                rank += m.mean_rank;
                cond += m.mean_cond_db;
                se += m.se_bps_hz;
                eta_db += hardening_metric(ch).eta_db();
                ++n_ok;
            }
            if (n_ok == 0)
                throw std::runtime_error("sweep: no usable rx location at f=" + std::to_string(f));
            pt.mean_rank = rank / n_ok;
            pt.mean_cond_db = cond / n_ok;
            pt.se_bps_hz = se / n_ok;
            pt.eta_db = eta_db / n_ok;
            table.push_back(pt);
        }
    }
    return table;
}

} // namespace detail

/// Fixed antenna count across frequencies: square Tx arrays of the given
/// sides (ascending), half-wavelength spacing at each carrier.
inline std::vector<SweepPoint>
sweep_fixed_count(const Scene &scene, const Vec3 &tx, const std::vector<Vec3> &rx_set,
                  const std::vector<double> &frequencies, const std::vector<int> &tx_sides,
                  int rx_side, const EvalConfig &eval_cfg, const TraceConfig &trace_cfg,
                  const SweepChannelParams &chan = {})
{
    for (std::size_t i = 1; i < tx_sides.size(); ++i)
        if (tx_sides[i] <= tx_sides[i - 1])
            throw std::invalid_argument("sweep_fixed_count: tx sizes must be strictly ascending");
    std::vector<std::pair<int, double>> sides;
    for (int s : tx_sides) {
        if (s < 1)
            throw std::invalid_argument("sweep_fixed_count: array side must be >= 1");
        sides.emplace_back(s, 0.0);
    }
    return detail::sweep_impl(scene, tx, rx_set, frequencies, sides, rx_side, eval_cfg, trace_cfg,
                              chan, /*fixed_aperture=*/false);
}

/// Fixed physical aperture: elements per side grow with frequency as
/// floor(L / (lambda/2)) + 1 at exactly half-wavelength spacing.
inline std::vector<SweepPoint>
sweep_fixed_aperture(const Scene &scene, const Vec3 &tx, const std::vector<Vec3> &rx_set,
                     const std::vector<double> &frequencies, const std::vector<double> &apertures_m,
                     int rx_side, const EvalConfig &eval_cfg, const TraceConfig &trace_cfg,
                     const SweepChannelParams &chan = {})
{
    std::vector<std::pair<int, double>> sides;
    for (double a : apertures_m) {
        if (!(a > 0.0))
            throw std::invalid_argument("sweep_fixed_aperture: apertures must be > 0");
        sides.emplace_back(0, a);
    }
    return detail::sweep_impl(scene, tx, rx_set, frequencies, sides, rx_side, eval_cfg, trace_cfg,
                              chan, /*fixed_aperture=*/true);
}

inline void write_sweep_csv(const std::vector<SweepPoint> &table, const std::string &path)
{
    csv::Writer w(path);
    w.row({"f_c_hz", "n_tx", "n_rx", "aperture_m", "mean_rank", "mean_cond_db", "se_bps_hz",
           "eta_db"});
    for (const SweepPoint &p : table)
        w.row({csv::fmt(p.f_c), std::to_string(p.n_tx), std::to_string(p.n_rx),
               csv::fmt(p.aperture_m), csv::fmt(p.mean_rank), csv::fmt(p.mean_cond_db),
               csv::fmt(p.se_bps_hz), csv::fmt(p.eta_db)});
}

} // namespace raychan
