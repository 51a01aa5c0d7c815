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
#include <string>
#include <vector>

#include "dyncam/cell.hpp"
#include "dyncam/metrics.hpp"

namespace dyncam {

/// Geometry and device configuration of one N x M macro.
struct MacroConfig {
    std::size_t n_rows = 1;  ///< N, words/keys
    std::size_t m_cols = 1;  ///< M, cells per word
    DeviceConstants constants;
    LevelSet levels = LevelSet::default_levels();
    unsigned adc_bits = 0;  ///< 0 derives min_adc_bits(m_cols)
    bool endurance_checking = true;
    double sigma_read = 0.0;  ///< V, per-read comparator noise (0 = ideal)
    std::uint64_t noise_seed = 0;

    /// Smallest bit count that represents every match count 0..M.
    static unsigned min_adc_bits(std::size_t m_cols);
    void validate() const;
};

/// Result of one broadcast search over all rows.
struct SearchResult {
    std::vector<std::uint32_t> counts;   ///< per-row match count, 0..M
    std::vector<double> ml_currents;     ///< A, counts*i_match + (M-counts)*i_mismatch
    std::vector<std::uint32_t> adc_codes;
    double energy_j = 0.0;
    double latency_s = 0.0;
};

/// Ideal saturating ADC: recovers the match count from an ML current,
/// clamped to [0, 2^adc_bits - 1].
std::uint32_t adc_readout(double current, const MacroConfig& cfg);

/// N x M array of cells with row-wise write, column-broadcast search and a
/// simulated clock. Requires exclusive access: write_row/search/advance_clock
/// all mutate the clock and the ledger. Row evaluation inside one search may
/// run on several threads; results are bit-identical to sequential order.
class Macro {
public:
    explicit Macro(MacroConfig config);

    const MacroConfig& config() const { return config_; }
    double clock() const { return clock_; }
    EnergyLedger& ledger() { return ledger_; }
    const EnergyLedger& ledger() const { return ledger_; }

    CellState& cell(std::size_t row, std::size_t col);
    const CellState& cell(std::size_t row, std::size_t col) const;

    /// Write one row at the current clock; advances the clock by t_write_row.
    void write_row(std::size_t row, std::span<const double> targets);

    /// Write rows 0..N-1 in order from a row-major N*M target vector.
    void write_matrix(std::span<const double> targets);

    /// Broadcast one query over all rows. Every cell is compared against the
    /// per-column window; the clock advances by t_read.
    SearchResult search(std::span<const double> vdl, std::span<const double> v_range);

    /// Same query with one shared window width for all columns.
    SearchResult search(std::span<const double> vdl, double v_range);

    void advance_clock(double dt);

    void set_threads(unsigned threads) { threads_ = threads == 0 ? 1 : threads; }
    unsigned threads() const { return threads_; }

    /// Restores clock/search counters from a state file; not for normal use.
    void restore_timing(double clock, std::uint64_t search_seq);
    std::uint64_t search_seq() const { return search_seq_; }

private:
    MacroConfig config_;
    std::vector<CellState> cells_;  // row-major
    double clock_ = 0.0;
    EnergyLedger ledger_;
    unsigned threads_ = 1;
    std::uint64_t search_seq_ = 0;  // per-read noise stream position
};

/// Per-search CSV block with columns (row,count,ml_current_A,adc_code).
std::string search_result_to_csv(const SearchResult& result);

}  // namespace dyncam
