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

#include "dyncam/attention.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dyncam/errors.hpp"
#include "dyncam/macro.hpp"
#include "dyncam/philox.hpp"

namespace dyncam {

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

double softplus_inv(double y) {
    if (!(y > 0.0)) throw std::invalid_argument("softplus_inv: argument must be positive");
    if (y > 30.0) return y;
    return std::log(std::expm1(y));
}

QuantizerCalibration QuantizerCalibration::fit(std::span<const Matrix* const> batches,
                                               const LevelSet& levels, double margin_frac) {
    levels.validate();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Matrix* m : batches) {
        for (double v : m->data()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(lo <= hi)) {
        throw std::invalid_argument("quantizer fit: no calibration values");
    }
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = margin_frac * (hi - lo);
    QuantizerCalibration q;
    q.x_min = lo - pad;
    q.x_max = hi + pad;
    q.v_lo = levels.voltages.front();
    q.v_hi = levels.voltages.back();
    q.calibrated = true;
    return q;
}

double QuantizerCalibration::to_voltage(double x) const {
    if (x <= x_min) return v_lo;
    if (x >= x_max) return v_hi;
    return v_lo + (x - x_min) * scale();
}

double QuantizerCalibration::gradient(double x) const {
    return (x >= x_min && x <= x_max) ? scale() : 0.0;
}

double soft_match(double v_store, double vdl, double r, double tau) {
    if (!(r > 0.0)) throw std::invalid_argument("soft_match: r must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("soft_match: tau must be positive");
    const double a = (v_store - vdl + 0.5 * r) / tau;
    const double b = (vdl + 0.5 * r - v_store) / tau;
    return logistic(a) * logistic(b);
}

SoftMatchGrads soft_match_grads(double v_store, double vdl, double r, double tau) {
    if (!(r > 0.0)) throw std::invalid_argument("soft_match_grads: r must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("soft_match_grads: tau must be positive");
    const double a = (v_store - vdl + 0.5 * r) / tau;
    const double b = (vdl + 0.5 * r - v_store) / tau;
    const double sa = logistic(a);
    const double sb = logistic(b);
    const double da = sa * (1.0 - sa);
    const double db = sb * (1.0 - sb);
    SoftMatchGrads g;
    g.d_v_store = (da * sb - sa * db) / tau;
    g.d_vdl = -g.d_v_store;
    g.d_r = (da * sb + sa * db) / (2.0 * tau);
    return g;
}

AttentionHead AttentionHead::init(std::size_t d_model, std::size_t d_head, std::uint64_t seed,
                                  const LevelSet& levels) {
    if (d_model < 1 || d_head < 1) {
        throw std::invalid_argument("attention head: dimensions must be >= 1");
    }
    levels.validate();
    AttentionHead h;
    h.d_model = d_model;
    h.d_head = d_head;
    h.levels = levels;
    h.w_q = Matrix(d_model, d_head);
    h.w_k = Matrix(d_model, d_head);
    h.w_v = Matrix(d_model, d_head);
    const double a = 1.0 / std::sqrt(static_cast<double>(d_model));
    std::uint64_t draw = 0;
    for (Matrix* w : {&h.w_q, &h.w_k, &h.w_v}) {
        for (double& v : w->data()) {
            v = philox::uniform(seed, 0, draw++, -a, a);
        }
    }
    h.range_rho.assign(d_head, softplus_inv(levels.v_range_default));
    return h;
}

std::vector<double> AttentionHead::v_range() const {
    std::vector<double> r(range_rho.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = softplus(range_rho[i]);
    return r;
}

void AttentionHead::set_v_range(std::span<const double> r) {
    if (r.size() != d_head) {
        throw std::invalid_argument("set_v_range: need one width per head dimension");
    }
    range_rho.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) range_rho[i] = softplus_inv(r[i]);
}

Matrix acam_scores_soft(const Matrix& q_volt, const Matrix& k_volt,
                        std::span<const double> v_range, double tau) {
    const std::size_t d = q_volt.cols();
    if (k_volt.cols() != d || v_range.size() != d) {
        throw std::invalid_argument("acam_scores_soft: dimension mismatch");
    }
    Matrix raw(q_volt.rows(), k_volt.rows());
    for (std::size_t i = 0; i < q_volt.rows(); ++i) {
        for (std::size_t j = 0; j < k_volt.rows(); ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                s += soft_match(k_volt(j, c), q_volt(i, c), v_range[c], tau);
            }
            raw(i, j) = s;
        }
    }
    return raw;
}

HardScores acam_scores_hard(const Matrix& q_volt, const Matrix& k_volt,
                            std::span<const double> v_range, const DeviceConstants& constants,
                            const LevelSet& levels) {
    const std::size_t d = q_volt.cols();
    if (k_volt.cols() != d || v_range.size() != d) {
        throw std::invalid_argument("acam_scores_hard: dimension mismatch");
    }
    MacroConfig cfg;
    cfg.n_rows = k_volt.rows();
    cfg.m_cols = d;
    cfg.constants = constants;
    cfg.levels = levels;
    Macro macro(cfg);
    for (std::size_t j = 0; j < k_volt.rows(); ++j) {
        std::vector<double> row(d);
        for (std::size_t c = 0; c < d; ++c) row[c] = k_volt(j, c);
        macro.write_row(j, row);
    }
    HardScores out;
    out.raw = Matrix(q_volt.rows(), k_volt.rows());
    std::vector<double> query(d);
    for (std::size_t i = 0; i < q_volt.rows(); ++i) {
        for (std::size_t c = 0; c < d; ++c) query[c] = q_volt(i, c);
        const SearchResult res = macro.search(query, v_range);
        for (std::size_t j = 0; j < k_volt.rows(); ++j) {
            out.raw(i, j) = static_cast<double>(res.counts[j]);
        }
    }
    out.energy_j = macro.ledger().total_energy_j();
    out.latency_s = macro.ledger().total_latency_s();
    return out;
}

Matrix normalize_scores(const Matrix& raw, double epsilon, const Matrix* mask) {
    if (mask && (mask->rows() != raw.rows() || mask->cols() != raw.cols())) {
        throw std::invalid_argument("normalize_scores: mask shape mismatch");
    }
    const std::size_t n = raw.cols();
    Matrix w(raw.rows(), n);
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        double sum = 0.0;
        std::size_t active = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (mask && (*mask)(i, j) == 0.0) continue;
            if (raw(i, j) < 0.0) {
                throw std::invalid_argument("normalize_scores: negative raw score");
            }
            sum += raw(i, j);
            ++active;
        }
        if (active == 0) continue;  // fully masked row stays zero
        const double denom = sum + epsilon;
        const double floor = epsilon / static_cast<double>(active);
        for (std::size_t j = 0; j < n; ++j) {
            if (mask && (*mask)(i, j) == 0.0) continue;
            w(i, j) = (raw(i, j) + floor) / denom;
        }
    }
    return w;
}

AttentionForward attention_forward(const Matrix& x, const AttentionHead& head, ScoreMode mode,
                                   bool causal, ForwardCache* cache) {
    if (x.cols() != head.d_model) {
        throw std::invalid_argument("attention_forward: input width != d_model");
    }
    if (!head.quantizer.calibrated) {
        throw StateError("attention_forward: quantizer is not calibrated");
    }
    const Matrix q = matmul(x, head.w_q);
    const Matrix k = matmul(x, head.w_k);
    const Matrix v = matmul(x, head.w_v);

    const bool snap = mode == ScoreMode::kHardQuantized;
    Matrix q_volt(q.rows(), q.cols());
    Matrix k_volt(k.rows(), k.cols());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        for (std::size_t c = 0; c < q.cols(); ++c) {
            const double vq = head.quantizer.to_voltage(q(i, c));
            const double vk = head.quantizer.to_voltage(k(i, c));
            q_volt(i, c) = snap ? head.levels.nearest(vq) : vq;
            k_volt(i, c) = snap ? head.levels.nearest(vk) : vk;
        }
    }

    const std::vector<double> ranges = head.v_range();
    AttentionForward out;
    if (mode == ScoreMode::kSoft) {
        out.scores.raw = acam_scores_soft(q_volt, k_volt, ranges, head.tau);
    } else {
        HardScores hs = acam_scores_hard(q_volt, k_volt, ranges, DeviceConstants{}, head.levels);
        out.scores.raw = std::move(hs.raw);
        out.energy_j = hs.energy_j;
        out.latency_s = hs.latency_s;
    }

    Matrix mask;
    if (causal) {
        mask = Matrix(out.scores.raw.rows(), out.scores.raw.cols());
        for (std::size_t i = 0; i < mask.rows(); ++i) {
            for (std::size_t j = 0; j <= i && j < mask.cols(); ++j) mask(i, j) = 1.0;
        }
    }
    out.scores.weights =
        normalize_scores(out.scores.raw, head.epsilon, causal ? &mask : nullptr);
    out.y = matmul(out.scores.weights, v);

    if (cache) {
        cache->mode = mode;
        cache->causal = causal;
        cache->x = x;
        cache->q = q;
        cache->k = k;
        cache->v = v;
        cache->q_volt = q_volt;
        cache->k_volt = k_volt;
        cache->raw = out.scores.raw;
        cache->weights = out.scores.weights;
        cache->mask = mask;
        cache->v_range = ranges;
    }
    return out;
}

HeadGrads attention_backward(const Matrix& grad_y, const AttentionHead& head,
                             const ForwardCache& cache) {
    if (cache.mode != ScoreMode::kSoft) {
        throw StateError("attention_backward: forward pass was not run in soft mode");
    }
    if (grad_y.rows() != cache.weights.rows() || grad_y.cols() != head.d_head) {
        throw std::invalid_argument("attention_backward: grad_y shape mismatch");
    }
    const std::size_t t_q = cache.weights.rows();
    const std::size_t t_k = cache.weights.cols();
    const std::size_t d = head.d_head;

    // y = W V
    const Matrix grad_w = matmul_nt(grad_y, cache.v);        // T_q x T_k
    const Matrix grad_v = matmul_tn(cache.weights, grad_y);  // T_k x d

    // weights = (raw + eps/n) / (sum + eps), per row
    Matrix grad_raw(t_q, t_k);
    for (std::size_t i = 0; i < t_q; ++i) {
        double sum = 0.0;
        double dot = 0.0;
        bool any = false;
        for (std::size_t j = 0; j < t_k; ++j) {
            if (cache.causal && cache.mask(i, j) == 0.0) continue;
            sum += cache.raw(i, j);
            dot += grad_w(i, j) * cache.weights(i, j);
            any = true;
        }
        if (!any) continue;
        const double denom = sum + head.epsilon;
        for (std::size_t j = 0; j < t_k; ++j) {
            if (cache.causal && cache.mask(i, j) == 0.0) continue;
            grad_raw(i, j) = (grad_w(i, j) - dot) / denom;
        }
    }

    // raw[i][j] = sum_c m(k_volt[j][c], q_volt[i][c], r[c])
    Matrix grad_q_volt(t_q, d);
    Matrix grad_k_volt(t_k, d);
    std::vector<double> grad_range(d, 0.0);
    for (std::size_t i = 0; i < t_q; ++i) {
        for (std::size_t j = 0; j < t_k; ++j) {
            const double g = grad_raw(i, j);
            if (g == 0.0) continue;
            for (std::size_t c = 0; c < d; ++c) {
                const SoftMatchGrads sg = soft_match_grads(cache.k_volt(j, c), cache.q_volt(i, c),
                                                           cache.v_range[c], head.tau);
                grad_k_volt(j, c) += g * sg.d_v_store;
                grad_q_volt(i, c) += g * sg.d_vdl;
                grad_range[c] += g * sg.d_r;
            }
        }
    }

    // voltage map is affine with clamped tails
    Matrix grad_q(t_q, d);
    Matrix grad_k(t_k, d);
    for (std::size_t i = 0; i < t_q; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            grad_q(i, c) = grad_q_volt(i, c) * head.quantizer.gradient(cache.q(i, c));
        }
    }
    for (std::size_t j = 0; j < t_k; ++j) {
        for (std::size_t c = 0; c < d; ++c) {
            grad_k(j, c) = grad_k_volt(j, c) * head.quantizer.gradient(cache.k(j, c));
        }
    }

    HeadGrads out;
    out.d_w_q = matmul_tn(cache.x, grad_q);
    out.d_w_k = matmul_tn(cache.x, grad_k);
    out.d_w_v = matmul_tn(cache.x, grad_v);
    out.d_x = matmul_nt(grad_q, head.w_q);
    add_inplace(out.d_x, matmul_nt(grad_k, head.w_k));
    add_inplace(out.d_x, matmul_nt(grad_v, head.w_v));
    out.d_v_range = std::move(grad_range);
    return out;
}

// TODO: straight-through estimator so hard-quantized scores can be trained
// directly instead of only evaluated.

}  // namespace dyncam
