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

#include "dyncam/variation.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dyncam/parallel.hpp"
#include "dyncam/philox.hpp"

namespace dyncam {

namespace {
// Frozen per-cell draws. Per-read noise uses draws >= 2^32 (see macro.cpp).
constexpr std::uint64_t kDrawOffsetLow = 0;
constexpr std::uint64_t kDrawOffsetHigh = 1;
constexpr std::uint64_t kDrawWrite = 2;
constexpr std::uint64_t kDrawReadLow = 3;
constexpr std::uint64_t kDrawReadHigh = 4;
}  // namespace

void VariationSpec::validate() const {
    if (sigma_cmp < 0.0 || sigma_write < 0.0 || sigma_read < 0.0) {
        throw std::invalid_argument("variation spec: sigmas must be non-negative");
    }
}

std::vector<CellVariation> sample_variation(const VariationSpec& spec, std::size_t n_cells,
                                            std::uint64_t first_cell_index) {
    spec.validate();
    std::vector<CellVariation> out(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        const std::uint64_t cell = first_cell_index + i;
        out[i].offset_low = spec.sigma_cmp * philox::normal(spec.seed, cell, kDrawOffsetLow);
        out[i].offset_high = spec.sigma_cmp * philox::normal(spec.seed, cell, kDrawOffsetHigh);
        out[i].write_offset = spec.sigma_write * philox::normal(spec.seed, cell, kDrawWrite);
    }
    return out;
}

void apply_variation(Macro& macro, const VariationSpec& spec) {
    const std::size_t n = macro.config().n_rows;
    const std::size_t m = macro.config().m_cols;
    const auto offsets = sample_variation(spec, n * m);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            CellState& cell = macro.cell(r, c);
            cell.offset_low = offsets[r * m + c].offset_low;
            cell.offset_high = offsets[r * m + c].offset_high;
            cell.write_offset = offsets[r * m + c].write_offset;
        }
    }
}

std::uint64_t ConfusionMatrix::off_diagonal_mass() const {
    std::uint64_t sum = 0;
    for (std::size_t a = 0; a < n_levels; ++a) {
        for (std::size_t b = 0; b < n_levels; ++b) {
            if (a != b) sum += at(a, b);
        }
    }
    return sum;
}

namespace {

// One single-cell trial: fresh device, write the stored voltage, search the
// query window, threshold the resulting ML current.
bool trial_matches(const VariationSpec& spec, std::uint64_t cell_index, double v_store,
                   double vdl, double v_range, double threshold, const DeviceConstants& k) {
    CellState cell;
    cell.offset_low = spec.sigma_cmp * philox::normal(spec.seed, cell_index, kDrawOffsetLow);
    cell.offset_high = spec.sigma_cmp * philox::normal(spec.seed, cell_index, kDrawOffsetHigh);
    cell.write_offset = spec.sigma_write * philox::normal(spec.seed, cell_index, kDrawWrite);
    cell = write_cell(cell, v_store, 0.0, k);
    double noise_low = 0.0, noise_high = 0.0;
    if (spec.sigma_read > 0.0) {
        noise_low = spec.sigma_read * philox::normal(spec.seed, cell_index, kDrawReadLow);
        noise_high = spec.sigma_read * philox::normal(spec.seed, cell_index, kDrawReadHigh);
    }
    const bool matched =
        cell_match(cell, search_window(vdl, v_range), 0.0, k, noise_low, noise_high);
    return cell_current(matched, k) > threshold;
}

}  // namespace

ConfusionMatrix run_confusion(const VariationSpec& spec, const LevelSet& levels,
                              std::size_t trials, double threshold, unsigned threads) {
    spec.validate();
    levels.validate();
    if (trials < 1) {
        throw std::invalid_argument("run_confusion: trials must be >= 1");
    }
    const std::size_t n = levels.count();
    const DeviceConstants k;  // defaults; only currents matter for the tally

    ConfusionMatrix cm;
    cm.n_levels = n;
    cm.trials = trials;
    cm.threshold = threshold;
    cm.counts.assign(n * n, 0);

    parallel_for(n * n, threads, [&](std::size_t pair) {
        const std::size_t a = pair / n;
        const std::size_t b = pair % n;
        std::uint64_t tally = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            const std::uint64_t cell_index = pair * trials + t;
            if (trial_matches(spec, cell_index, levels.voltages[a], levels.voltages[b],
                              levels.v_range_default, threshold, k)) {
                ++tally;
            }
        }
        cm.counts[pair] = tally;
    });
    return cm;
}

CurrentSamples current_distribution(const VariationSpec& spec, const SearchCondition& match_case,
                                    const SearchCondition& mismatch_case, std::size_t trials) {
    spec.validate();
    const DeviceConstants k;
    CurrentSamples cs;
    cs.match_a.resize(trials);
    cs.mismatch_a.resize(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        // Same sampled device measured under both conditions.
        CellState cell;
        cell.offset_low = spec.sigma_cmp * philox::normal(spec.seed, t, kDrawOffsetLow);
        cell.offset_high = spec.sigma_cmp * philox::normal(spec.seed, t, kDrawOffsetHigh);
        cell.write_offset = spec.sigma_write * philox::normal(spec.seed, t, kDrawWrite);
        double noise_low = 0.0, noise_high = 0.0;
        if (spec.sigma_read > 0.0) {
            noise_low = spec.sigma_read * philox::normal(spec.seed, t, kDrawReadLow);
            noise_high = spec.sigma_read * philox::normal(spec.seed, t, kDrawReadHigh);
        }
        CellState stored = write_cell(cell, match_case.v_store, 0.0, k);
        cs.match_a[t] = cell_current(
            cell_match(stored, search_window(match_case.vdl, match_case.v_range), 0.0, k,
                       noise_low, noise_high),
            k);
        stored = write_cell(cell, mismatch_case.v_store, 0.0, k);
        cs.mismatch_a[t] = cell_current(
            cell_match(stored, search_window(mismatch_case.vdl, mismatch_case.v_range), 0.0, k,
                       noise_low, noise_high),
            k);
    }
    return cs;
}

ConfusionSummary summarize(const ConfusionMatrix& cm) {
    ConfusionSummary s;
    s.per_level_accuracy.resize(cm.n_levels);
    for (std::size_t a = 0; a < cm.n_levels; ++a) {
        s.per_level_accuracy[a] =
            static_cast<double>(cm.at(a, a)) / static_cast<double>(cm.trials);
        if (10 * cm.at(a, a) >= 9 * cm.trials) {  // >= 90% without float compare
            ++s.levels_at_90pct;
        }
    }
    s.effective_bits = 0;
    while ((2ull << s.effective_bits) <= s.levels_at_90pct) ++s.effective_bits;
    if (s.levels_at_90pct < 2) s.effective_bits = 0;
    return s;
}

std::string confusion_to_csv(const ConfusionMatrix& cm) {
    std::string out = "stored_level,query_level,matches,trials\n";
    char buf[96];
    for (std::size_t a = 0; a < cm.n_levels; ++a) {
        for (std::size_t b = 0; b < cm.n_levels; ++b) {
            std::snprintf(buf, sizeof(buf), "%zu,%zu,%llu,%zu\n", a, b,
                          static_cast<unsigned long long>(cm.at(a, b)), cm.trials);
            out += buf;
        }
    }
    return out;
}

std::string summary_to_text(const ConfusionSummary& s, const ConfusionMatrix& cm) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "levels %zu\ntrials %zu\nthreshold_A %.17g\n", cm.n_levels,
                  cm.trials, cm.threshold);
    out += buf;
    for (std::size_t a = 0; a < s.per_level_accuracy.size(); ++a) {
        std::snprintf(buf, sizeof(buf), "level_%zu_accuracy %.17g\n", a,
                      s.per_level_accuracy[a]);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "levels_at_90pct %zu\neffective_bits %u\n",
                  s.levels_at_90pct, s.effective_bits);
    out += buf;
    return out;
}

std::string current_samples_to_csv(const CurrentSamples& cs) {
    std::string out = "trial,match_current_A,mismatch_current_A\n";
    char buf[96];
    for (std::size_t t = 0; t < cs.match_a.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", t, cs.match_a[t],
                      cs.mismatch_a[t]);
        out += buf;
    }
    return out;
}

}  // namespace dyncam
