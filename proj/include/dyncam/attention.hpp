// Copyright 2026 The dyncam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dyncam/cell.hpp"
#include "dyncam/matrix.hpp"

namespace dyncam {

double logistic(double x);
double softplus(double x);
double softplus_inv(double y);  // y must be > 0

/// Affine map from an activation range onto the level span, clamped at the
/// ends. Snapping to the nearest level is idempotent.
struct QuantizerCalibration {
    double x_min = 0.0;
    double x_max = 1.0;
    double v_lo = 0.0;
    double v_hi = 1.0;
    bool calibrated = false;

    /// Fits [x_min, x_max] to the min/max over the given matrices, widened
    /// by margin_frac on each side, mapping onto the level span.
    static QuantizerCalibration fit(std::span<const Matrix* const> batches,
                                    const LevelSet& levels, double margin_frac = 0.0);

    double scale() const { return (v_hi - v_lo) / (x_max - x_min); }
    double to_voltage(double x) const;
    double gradient(double x) const;  ///< dV/dx: scale inside, 0 when clamped
};

/// Smooth window-match surrogate: the product of two logistic gates,
///   m = sigmoid((v_store - vdl + r/2)/tau) * sigmoid((vdl + r/2 - v_store)/tau).
/// As tau -> 0 this approaches the hard window indicator everywhere except
/// on the window boundary.
double soft_match(double v_store, double vdl, double r, double tau);

struct SoftMatchGrads {
    double d_v_store = 0.0;
    double d_vdl = 0.0;
    double d_r = 0.0;
};

/// Analytic partials of soft_match; validated against central differences.
SoftMatchGrads soft_match_grads(double v_store, double vdl, double r, double tau);

enum class ScoreMode { kSoft, kHardContinuous, kHardQuantized };

/// One similarity head. Keys/queries are projected, mapped to voltages and
/// compared per dimension; the per-dimension window widths are learnable
/// through a softplus reparameterization that keeps them positive.
struct AttentionHead {
    std::size_t d_model = 0;
    std::size_t d_head = 0;
    Matrix w_q, w_k, w_v;           ///< d_model x d_head
    std::vector<double> range_rho;  ///< v_range = softplus(rho), one per dimension
    double tau = 0.01;              ///< V, surrogate temperature
    double epsilon = 1e-6;          ///< normalization floor
    LevelSet levels = LevelSet::default_levels();
    QuantizerCalibration quantizer;

    static AttentionHead init(std::size_t d_model, std::size_t d_head, std::uint64_t seed,
                              const LevelSet& levels = LevelSet::default_levels());

    std::vector<double> v_range() const;
    void set_v_range(std::span<const double> r);
};

/// Soft similarity scores: raw[i][j] = sum_d soft_match(K[j][d], Q[i][d]).
Matrix acam_scores_soft(const Matrix& q_volt, const Matrix& k_volt,
                        std::span<const double> v_range, double tau);

struct HardScores {
    Matrix raw;  ///< integer match counts, 0..d_head
    double energy_j = 0.0;
    double latency_s = 0.0;
};

/// Hard similarity scores through a macro: keys are written row-wise, every
/// query issues one broadcast search, energy/latency are charged per event.
HardScores acam_scores_hard(const Matrix& q_volt, const Matrix& k_volt,
                            std::span<const double> v_range, const DeviceConstants& constants,
                            const LevelSet& levels);

/// Linear sum-to-one normalization with an epsilon floor. All-zero rows fall
/// back to uniform weights. mask (0/1, same shape) excludes key positions
/// entirely when given.
Matrix normalize_scores(const Matrix& raw, double epsilon, const Matrix* mask = nullptr);

struct ScoreMatrix {
    Matrix raw;
    Matrix weights;
};

/// Everything the backward pass needs, captured by attention_forward.
struct ForwardCache {
    ScoreMode mode = ScoreMode::kSoft;
    bool causal = false;
    Matrix x, q, k, v;
    Matrix q_volt, k_volt;
    Matrix raw, weights;
    Matrix mask;  // empty when not causal
    std::vector<double> v_range;
};

struct AttentionForward {
    Matrix y;  ///< T x d_head
    ScoreMatrix scores;
    double energy_j = 0.0;   ///< nonzero only in hard modes
    double latency_s = 0.0;
};

/// Self-attention over x (T x d_model). Hard modes run the scores through a
/// macro and report the charged energy/latency.
AttentionForward attention_forward(const Matrix& x, const AttentionHead& head, ScoreMode mode,
                                   bool causal = false, ForwardCache* cache = nullptr);

struct HeadGrads {
    Matrix d_x, d_w_q, d_w_k, d_w_v;
    std::vector<double> d_v_range;
};

/// Exact reverse-mode gradients of the soft forward pass.
HeadGrads attention_backward(const Matrix& grad_y, const AttentionHead& head,
                             const ForwardCache& cache);

}  // namespace dyncam
