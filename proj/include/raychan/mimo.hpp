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

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "raychan/channel.hpp"

namespace raychan {

struct EvalConfig {
    double zeta = 1e-3;      // relative singular-value threshold for the rank
    double rho = 100.0;      // linear mean SNR (20 dB)
    double cond_cap_db = 60.0;
    bool normalize = true;   // scale E_k[||H_k||_F^2] to N_t * N_r before applying rho
};

/// SVD-based performance summary of one realization.
struct MimoMetrics {
    double mean_rank = 0.0;    // effective rank averaged over subcarriers
    double mean_cond_db = 0.0; // dB-domain mean condition number
    double se_bps_hz = 0.0;
    std::vector<std::vector<double>> singular_values; // per subcarrier, descending
};

struct HardeningResult {
    double eta = 0.0; // linear
    int n_tx = 0;
    int n_rx = 0;

    double eta_db() const { return 10.0 * std::log10(eta); }
};

/// Singular values of a complex rows x cols matrix (row-major), descending.
inline std::vector<double> singular_values(const cplx *data, int rows, int cols)
{
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(data[i].real()) || !std::isfinite(data[i].imag()))
            throw std::invalid_argument("singular_values: non-finite matrix entry");
    using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const Mat> h(data, rows, cols);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd;
    if (rows >= cols)
        svd.compute(Eigen::MatrixXcd(h));
    else
        svd.compute(Eigen::MatrixXcd(h.adjoint())); // same spectrum, keeps QR happy
    const auto &sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

inline std::vector<double> singular_values(const std::vector<cplx> &h, int rows, int cols)
{
    if (h.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw std::invalid_argument("singular_values: size mismatch");
    return singular_values(h.data(), rows, cols);
}

/// Count of singular values within the relative threshold: sigma_i >= zeta * sigma_1
/// (inclusive). An all-zero matrix has rank 0 by convention.
inline int effective_rank(std::span<const double> sv, double zeta)
{
    if (!(zeta > 0.0 && zeta < 1.0))
        throw std::invalid_argument("effective_rank: zeta must be in (0, 1)");
    if (sv.empty() || sv[0] <= 0.0)
        return 0;
    const double threshold = zeta * sv[0];
    int r = 0;
    for (double s : sv)
        if (s >= threshold)
            ++r;
    return r;
}

/// 20 log10(sigma_1 / sigma_m), capped. Singular values below 1e-12 * sigma_1
/// count as zero and produce the cap.
inline double condition_number_db(std::span<const double> sv, double cap_db)
{
    if (sv.empty())
        throw std::invalid_argument("condition_number_db: empty singular values");
    const double s1 = sv.front();
    const double sm = sv.back();
    if (s1 <= 0.0 || sm <= 1e-12 * s1)
        return cap_db;
    return std::min(cap_db, 20.0 * std::log10(s1 / sm));
}

/// Equal-power spectral efficiency from per-subcarrier singular values:
/// C = (1/N_f) sum_k sum_i log2(1 + (rho / N_t) sigma_{k,i}^2).
inline double spectral_efficiency(const std::vector<std::vector<double>> &sv_per_subcarrier,
                                  double rho, int n_tx)
{
    if (!(rho > 0.0))
        throw std::invalid_argument("spectral_efficiency: rho must be > 0");
    if (sv_per_subcarrier.empty())
        throw std::invalid_argument("spectral_efficiency: no subcarriers");
    double c = 0.0;
    for (const auto &sv : sv_per_subcarrier)
        for (double s : sv)
            c += std::log2(1.0 + rho / n_tx * s * s);
    return c / static_cast<double>(sv_per_subcarrier.size());
}

inline double mean_frobenius_sq(const MimoChannel &ch)
{
    double s = 0.0;
    for (int k = 0; k < ch.n_f; ++k)
        s += ch.frobenius_sq(k);
    return s / ch.n_f;
}

/// Scales the channel so that E_k[||H_k||_F^2] = N_t * N_r, making a common
/// SNR meaningful across sites and frequencies. Returns the applied factor.
inline double normalize_channel(MimoChannel &ch)
{
    const double mean_g = mean_frobenius_sq(ch);
    if (!(mean_g > 0.0))
        throw std::invalid_argument("normalize_channel: zero channel");
    const double target = static_cast<double>(ch.n_rx) * static_cast<double>(ch.n_tx);
    const double factor = std::sqrt(target / mean_g);
    for (cplx &v : ch.h)
        v *= factor;
    return factor;
}

inline double spectral_efficiency(const MimoChannel &channel, double rho, int n_tx)
{
    std::vector<std::vector<double>> sv(static_cast<std::size_t>(channel.n_f));
    for (int k = 0; k < channel.n_f; ++k)
        sv[static_cast<std::size_t>(k)] =
            singular_values(channel.subcarrier(k), channel.n_rx, channel.n_tx);
    return spectral_efficiency(sv, rho, n_tx);
}

/// Full per-realization evaluation: per-subcarrier SVD, effective rank and
/// condition number averages, and Eq.-style equal-power SE. Normalization
/// (when enabled) rescales a copy; rank and condition number are
/// scale-invariant either way.
inline MimoMetrics evaluate_mimo(const MimoChannel &channel, const EvalConfig &cfg,
                                 bool keep_singular_values = false)
{
    if (channel.n_f < 1)
        throw std::invalid_argument("evaluate_mimo: empty channel");
    double scale = 1.0;
    if (cfg.normalize) {
        const double mean_g = mean_frobenius_sq(channel);
        if (!(mean_g > 0.0))
            throw std::invalid_argument("evaluate_mimo: zero channel");
        scale = std::sqrt(static_cast<double>(channel.n_rx) * channel.n_tx / mean_g);
    }
    MimoMetrics m;
    double rank_sum = 0.0, cond_sum = 0.0, se_sum = 0.0;
    std::vector<cplx> scratch(static_cast<std::size_t>(channel.n_rx) *
                              static_cast<std::size_t>(channel.n_tx));
    for (int k = 0; k < channel.n_f; ++k) {
        const cplx *hk = channel.subcarrier(k);
        for (std::size_t i = 0; i < scratch.size(); ++i)
            scratch[i] = hk[i] * scale;
        auto sv = singular_values(scratch.data(), channel.n_rx, channel.n_tx);
        rank_sum += effective_rank(sv, cfg.zeta);
        cond_sum += condition_number_db(sv, cfg.cond_cap_db);
        for (double s : sv)
            se_sum += std::log2(1.0 + cfg.rho / channel.n_tx * s * s);
        if (keep_singular_values)
            m.singular_values.push_back(std::move(sv));
    }
    m.mean_rank = rank_sum / channel.n_f;
    m.mean_cond_db = cond_sum / channel.n_f;
    m.se_bps_hz = se_sum / channel.n_f;
    return m;
}

/// Wideband hardening metric from per-subcarrier ensembles of channel gains:
/// eta = (1/N_f) sum_k Var(g_k) / E[g_k]^2, with g = ||H||_F^2 and unbiased
/// sample variance across the ensemble.
inline double hardening_from_gain_samples(const std::vector<std::vector<double>> &gains)
{
    if (gains.empty())
        throw std::invalid_argument("hardening: no subcarriers");
    double eta_sum = 0.0;
    for (const auto &g : gains) {
        if (g.size() < 2)
            throw std::invalid_argument("hardening: ensemble needs >= 2 samples per subcarrier");
        double mean = 0.0;
        for (double v : g)
            mean += v;
        mean /= static_cast<double>(g.size());
        if (!(mean > 0.0))
            throw std::invalid_argument("hardening: degenerate (zero) channel gain");
        double var = 0.0;
        for (double v : g)
            var += (v - mean) * (v - mean);
        var /= static_cast<double>(g.size() - 1);
        eta_sum += var / (mean * mean);
    }
    return eta_sum / static_cast<double>(gains.size());
}

/// Deterministic single-realization fallback: the ensemble is formed across
/// subcarriers, i.e. eta = Var_k(||H_k||_F^2) / E_k[||H_k||_F^2]^2.
inline HardeningResult hardening_metric(const MimoChannel &channel)
{
    if (channel.n_f < 2)
        throw std::invalid_argument("hardening_metric: need at least 2 subcarriers");
    std::vector<double> g(static_cast<std::size_t>(channel.n_f));
    for (int k = 0; k < channel.n_f; ++k)
        g[static_cast<std::size_t>(k)] = channel.frobenius_sq(k);
    HardeningResult r;
    r.eta = hardening_from_gain_samples({g});
    r.n_tx = channel.n_tx;
    r.n_rx = channel.n_rx;
    return r;
}

/// Ensemble mode: Var/E taken across realizations per subcarrier, averaged
/// over subcarriers.
inline HardeningResult hardening_metric(const std::vector<MimoChannel> &ensemble)
{
    if (ensemble.size() < 2)
        throw std::invalid_argument("hardening_metric: ensemble needs >= 2 realizations");
    const int n_f = ensemble.front().n_f;
    for (const MimoChannel &ch : ensemble)
        if (ch.n_f != n_f || ch.n_rx != ensemble.front().n_rx || ch.n_tx != ensemble.front().n_tx)
            throw std::invalid_argument("hardening_metric: inconsistent ensemble dimensions");
    std::vector<std::vector<double>> gains(static_cast<std::size_t>(n_f));
    for (auto &g : gains)
        g.reserve(ensemble.size());
    for (const MimoChannel &ch : ensemble)
        for (int k = 0; k < n_f; ++k)
            gains[static_cast<std::size_t>(k)].push_back(ch.frobenius_sq(k));
    HardeningResult r;
    r.eta = hardening_from_gain_samples(gains);
    r.n_tx = ensemble.front().n_tx;
    r.n_rx = ensemble.front().n_rx;
    return r;
}

struct HardenedSe {
    double approx_bps_hz = 0.0; // log2(1 + rho E[||H_k||_F^2]), averaged over k
    double exact_bps_hz = 0.0;  // (1/N_f) sum_k log2(1 + rho ||H_k||_F^2)
    double abs_error = 0.0;
};

/// Matched-filter SE and its hardened approximation. For a single
/// deterministic realization the expectation is across subcarriers.
inline HardenedSe hardened_se(const MimoChannel &channel, double rho)
{
    if (channel.n_f < 1)
        throw std::invalid_argument("hardened_se: empty channel");
    double mean_g = 0.0, exact = 0.0;
    for (int k = 0; k < channel.n_f; ++k) {
        const double g = channel.frobenius_sq(k);
        mean_g += g;
        exact += std::log2(1.0 + rho * g);
    }
    mean_g /= channel.n_f;
    exact /= channel.n_f;
    HardenedSe r;
    r.approx_bps_hz = std::log2(1.0 + rho * mean_g);
    r.exact_bps_hz = exact;
    r.abs_error = std::abs(exact - r.approx_bps_hz);
    return r;
}

/// Ensemble version: expectation across realizations per subcarrier.
inline HardenedSe hardened_se(const std::vector<MimoChannel> &ensemble, double rho)
{
    if (ensemble.empty())
        throw std::invalid_argument("hardened_se: empty ensemble");
    const int n_f = ensemble.front().n_f;
    double approx = 0.0, exact = 0.0;
    for (int k = 0; k < n_f; ++k) {
        double mean_g = 0.0;
        for (const MimoChannel &ch : ensemble) {
            const double g = ch.frobenius_sq(k);
            mean_g += g;
            exact += std::log2(1.0 + rho * g);
        }
        mean_g /= static_cast<double>(ensemble.size());
        approx += std::log2(1.0 + rho * mean_g);
    }
    HardenedSe r;
    r.approx_bps_hz = approx / n_f;
    r.exact_bps_hz = exact / (n_f * static_cast<double>(ensemble.size()));
    r.abs_error = std::abs(r.exact_bps_hz - r.approx_bps_hz);
    return r;
}

} // namespace raychan
