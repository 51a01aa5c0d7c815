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
#include <string>
#include <vector>

#include "dyncam/cell.hpp"
#include "dyncam/macro.hpp"

namespace dyncam {

/// Monte Carlo variation knobs. sigma_cmp/sigma_write are frozen per cell;
/// sigma_read is drawn fresh on every comparison. Identical seed and spec
/// reproduce identical offsets regardless of parallelism.
struct VariationSpec {
    double sigma_cmp = 5e-3;    ///< V, comparator offset std-dev (calibration knob)
    double sigma_write = 2e-3;  ///< V, write landing error std-dev
    double sigma_read = 0.0;    ///< V, per-read noise std-dev
    std::uint64_t seed = 0;

    void validate() const;
};

struct CellVariation {
    double offset_low = 0.0;
    double offset_high = 0.0;
    double write_offset = 0.0;
};

/// Gaussian offsets for cells [first_cell_index, first_cell_index+n_cells).
/// Draw k of cell i depends only on (seed, i, k), so the list is stable
/// under resizing and may be sampled in any order.
std::vector<CellVariation> sample_variation(const VariationSpec& spec, std::size_t n_cells,
                                            std::uint64_t first_cell_index = 0);

/// Installs sampled offsets on every cell of the macro (row-major indexing).
void apply_variation(Macro& macro, const VariationSpec& spec);

/// Match tallies for every (stored level, query level) combination.
struct ConfusionMatrix {
    std::size_t n_levels = 0;
    std::size_t trials = 0;
    double threshold = 0.0;                ///< A
    std::vector<std::uint64_t> counts;     ///< n_levels x n_levels, row-major [stored][query]

    std::uint64_t at(std::size_t stored, std::size_t query) const {
        return counts[stored * n_levels + query];
    }
    std::uint64_t off_diagonal_mass() const;
};

/// For each (stored, query) level pair, instantiates `trials` independent
/// cells with sampled variation, writes the stored level, searches with the
/// default window width and tallies trials whose ML current exceeds the
/// threshold.
ConfusionMatrix run_confusion(const VariationSpec& spec, const LevelSet& levels,
                              std::size_t trials, double threshold, unsigned threads = 1);

/// One (stored voltage, query voltage) condition for the current-CDF runs.
struct SearchCondition {
    double v_store = 0.45;
    double vdl = 0.45;
    double v_range = 0.05;
};

struct CurrentSamples {
    std::vector<double> match_a;     ///< A, per-trial ML current, match condition
    std::vector<double> mismatch_a;  ///< A, per-trial ML current, mismatch condition
};

/// Per-trial single-cell ML currents under a match and a mismatch condition.
/// Both conditions reuse the same sampled device per trial.
CurrentSamples current_distribution(const VariationSpec& spec, const SearchCondition& match_case,
                                    const SearchCondition& mismatch_case, std::size_t trials);

/// Per-level accuracy and the resulting usable bit count.
struct ConfusionSummary {
    std::vector<double> per_level_accuracy;  ///< diagonal / trials
    std::size_t levels_at_90pct = 0;
    unsigned effective_bits = 0;  ///< floor(log2(levels_at_90pct)), 0 if none
};

ConfusionSummary summarize(const ConfusionMatrix& cm);

std::string confusion_to_csv(const ConfusionMatrix& cm);
std::string summary_to_text(const ConfusionSummary& s, const ConfusionMatrix& cm);
std::string current_samples_to_csv(const CurrentSamples& cs);

}  // namespace dyncam
