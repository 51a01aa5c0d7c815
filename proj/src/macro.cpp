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

#include "dyncam/macro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dyncam/errors.hpp"
#include "dyncam/parallel.hpp"
#include "dyncam/philox.hpp"

namespace dyncam {

namespace {
// Per-read noise draws live above 2^32 so they never collide with the
// variation draws (0..2) keyed by the same seed.
constexpr std::uint64_t kReadNoiseDrawBase = 1ull << 32;
}  // namespace

unsigned MacroConfig::min_adc_bits(std::size_t m_cols) {
    unsigned bits = 1;
    while ((1ull << bits) < m_cols + 1) ++bits;
    return bits;
}

void MacroConfig::validate() const {
    if (n_rows < 1 || m_cols < 1) {
        throw std::invalid_argument("macro config: need n_rows >= 1 and m_cols >= 1");
    }
    constants.validate();
    levels.validate();
    if (adc_bits != 0 && adc_bits > 30) {
        throw std::invalid_argument("macro config: adc_bits out of range");
    }
    if (sigma_read < 0.0) {
        throw std::invalid_argument("macro config: sigma_read must be non-negative");
    }
}

std::uint32_t adc_readout(double current, const MacroConfig& cfg) {
    if (current < 0.0) {
        throw std::invalid_argument("adc_readout: negative current");
    }
    const DeviceConstants& k = cfg.constants;
    const double m = static_cast<double>(cfg.m_cols);
    double code = std::round((current - m * k.i_mismatch) / (k.i_match - k.i_mismatch));
    const double max_code = static_cast<double>((1ull << cfg.adc_bits) - 1);
    code = std::clamp(code, 0.0, max_code);
    return static_cast<std::uint32_t>(code);
}

Macro::Macro(MacroConfig config)
    : config_(std::move(config)), ledger_(LedgerCosts::from(config_.constants)) {
    if (config_.adc_bits == 0) {
        config_.adc_bits = MacroConfig::min_adc_bits(config_.m_cols);
    }
    config_.validate();
    cells_.resize(config_.n_rows * config_.m_cols);
}

CellState& Macro::cell(std::size_t row, std::size_t col) {
    if (row >= config_.n_rows || col >= config_.m_cols) {
        throw std::invalid_argument("macro: cell index out of range");
    }
    return cells_[row * config_.m_cols + col];
}

const CellState& Macro::cell(std::size_t row, std::size_t col) const {
    return const_cast<Macro*>(this)->cell(row, col);
}

void Macro::write_row(std::size_t row, std::span<const double> targets) {
    const std::size_t m = config_.m_cols;
    if (row >= config_.n_rows) {
        throw std::invalid_argument("write_row: row index out of range");
    }
    if (targets.size() != m) {
        throw std::invalid_argument("write_row: target vector length != m_cols");
    }
    // Validate everything before mutating so a failed write leaves the
    // array untouched.
    for (double t : targets) {
        if (!(t >= 0.0 && t <= config_.constants.vdd)) {
            throw std::invalid_argument("write_row: target outside the rail range");
        }
    }
    if (config_.endurance_checking) {
        for (std::size_t c = 0; c < m; ++c) {
            if (cells_[row * m + c].write_count >= config_.constants.endurance_limit) {
                throw EnduranceError("write_row: endurance limit reached");
            }
        }
    }
    for (std::size_t c = 0; c < m; ++c) {
        cells_[row * m + c] = write_cell(cells_[row * m + c], targets[c], clock_,
                                         config_.constants, config_.endurance_checking);
    }
    clock_ += config_.constants.t_write_row;
    ledger_.record_row_write(m);
}

void Macro::write_matrix(std::span<const double> targets) {
    const std::size_t n = config_.n_rows;
    const std::size_t m = config_.m_cols;
    if (targets.size() != n * m) {
        throw std::invalid_argument("write_matrix: target vector length != n_rows*m_cols");
    }
    for (std::size_t r = 0; r < n; ++r) {
        write_row(r, targets.subspan(r * m, m));
    }
}

SearchResult Macro::search(std::span<const double> vdl, std::span<const double> v_range) {
    const std::size_t n = config_.n_rows;
    const std::size_t m = config_.m_cols;
    if (vdl.size() != m || v_range.size() != m) {
        throw std::invalid_argument("search: query vector length != m_cols");
    }
    std::vector<VoltageWindow> windows(m);
    for (std::size_t c = 0; c < m; ++c) {
        windows[c] = search_window(vdl[c], v_range[c]);
    }

    SearchResult res;
    res.counts.resize(n);
    res.ml_currents.resize(n);
    res.adc_codes.resize(n);

    const DeviceConstants& k = config_.constants;
    const double now = clock_;
    const bool noisy = config_.sigma_read > 0.0;
    const std::uint64_t seq = search_seq_;

    parallel_for(n, threads_, [&](std::size_t r) {
        std::uint32_t count = 0;
        for (std::size_t c = 0; c < m; ++c) {
            const std::size_t idx = r * m + c;
            double noise_low = 0.0, noise_high = 0.0;
            if (noisy) {
                noise_low = config_.sigma_read *
                            philox::normal(config_.noise_seed, idx, kReadNoiseDrawBase + 2 * seq);
                noise_high = config_.sigma_read * philox::normal(config_.noise_seed, idx,
                                                                 kReadNoiseDrawBase + 2 * seq + 1);
            }
            if (cell_match(cells_[idx], windows[c], now, k, noise_low, noise_high)) {
                ++count;
            }
        }
        res.counts[r] = count;
        res.ml_currents[r] = static_cast<double>(count) * k.i_match +
                             static_cast<double>(m - count) * k.i_mismatch;
        res.adc_codes[r] = adc_readout(res.ml_currents[r], config_);
    });

    std::uint64_t total_matches = 0;
    for (std::size_t r = 0; r < n; ++r) total_matches += res.counts[r];
    const std::uint64_t total_cells = static_cast<std::uint64_t>(n) * m;
    ledger_.record_search(total_matches, total_cells - total_matches);

    const LedgerCosts& costs = ledger_.costs();
    const std::int64_t energy_aj =
        static_cast<std::int64_t>(total_matches) * costs.e_match_aj +
        static_cast<std::int64_t>(total_cells - total_matches) * costs.e_mismatch_aj;
    res.energy_j = static_cast<double>(energy_aj) * 1e-18;
    res.latency_s = static_cast<double>(costs.t_read_fs) * 1e-15;

    clock_ += k.t_read;
    ++search_seq_;
    return res;
}

SearchResult Macro::search(std::span<const double> vdl, double v_range) {
    std::vector<double> ranges(config_.m_cols, v_range);
    return search(vdl, ranges);
}

void Macro::advance_clock(double dt) {
    if (dt < 0.0) {
        throw std::invalid_argument("advance_clock: dt must be non-negative");
    }
    clock_ += dt;
}

void Macro::restore_timing(double clock, std::uint64_t search_seq) {
    clock_ = clock;
    search_seq_ = search_seq;
}

std::string search_result_to_csv(const SearchResult& result) {
    std::string out = "row,count,ml_current_A,adc_code\n";
    char buf[128];
    for (std::size_t r = 0; r < result.counts.size(); ++r) {
        std::snprintf(buf, sizeof(buf), "%zu,%u,%.17g,%u\n", r, result.counts[r],
                      result.ml_currents[r], result.adc_codes[r]);
        out += buf;
    }
    return out;
}

}  // namespace dyncam
