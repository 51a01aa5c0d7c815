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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dyncam {

/// Electrical, energy and timing constants of one cell. SI units throughout.
/// Defaults are the 28 nm gain-cell figures the simulator is calibrated to.
struct DeviceConstants {
    double i_match = 1.826e-6;                ///< A, ML current of a matching cell
    double i_mismatch = 0.5e-12;              ///< A, leakage of a mismatching cell
    double match_threshold_current = 350e-9;  ///< A, readout decision threshold
    double e_search_match = 8.1e-15;          ///< J per cell per search, match
    double e_search_mismatch = 2.6e-15;       ///< J per cell per search, mismatch
    double e_write = 4.8e-15;                 ///< J per cell write
    double t_read = 6e-9;                     ///< s, one search (worst case)
    double t_write_row = 20e-9;               ///< s, one row write
    double retention_droop_rate = 25e-6;      ///< V/s, linear droop toward ground
    std::uint64_t endurance_limit = 100'000'000'000ull;
    double vdd = 0.9;                         ///< rail clamp only

    void validate() const;  // throws std::invalid_argument
};

/// The discrete write/search voltage grid: strictly increasing levels with
/// uniform spacing. Adjacent windows at v_range_default must not overlap,
/// i.e. v_range_default <= spacing.
struct LevelSet {
    std::vector<double> voltages;
    double v_range_default = 0.05;  ///< V, window width

    /// 8 levels, 0.25 V .. 0.60 V in 50 mV steps.
    static LevelSet default_levels();

    std::size_t count() const { return voltages.size(); }
    double spacing() const;
    double nearest(double v) const;
    std::size_t nearest_index(double v) const;
    void validate() const;
};

/// One cell: stored voltage plus frozen per-cell variation and wear state.
/// Comparator offsets are input-referred and fixed at variation-sampling
/// time; write_offset is the landing error applied once per write.
struct CellState {
    double v_store = 0.0;
    double offset_low = 0.0;   ///< V, lower-bound comparator offset
    double offset_high = 0.0;  ///< V, upper-bound comparator offset
    double write_offset = 0.0;
    std::uint64_t write_count = 0;
    double last_write_time = 0.0;  ///< s, simulated time
};

struct VoltageWindow {
    double low = 0.0;
    double high = 0.0;
};

/// Window around a query voltage: [vdl - v_range/2, vdl + v_range/2].
VoltageWindow search_window(double vdl, double v_range);

/// Stored voltage after linear retention droop, clamped at ground.
double effective_stored_voltage(const CellState& cell, double now, const DeviceConstants& k);

/// Strict window comparison of the drooped stored voltage. The per-cell
/// offsets shift the respective comparator thresholds; noise_low/noise_high
/// add an optional per-read term on top (zero by default).
bool cell_match(const CellState& cell, const VoltageWindow& w, double now,
                const DeviceConstants& k, double noise_low = 0.0, double noise_high = 0.0);

/// Two-valued ML current contribution of one cell.
double cell_current(bool is_match, const DeviceConstants& k);

/// Write the cell: the landing voltage is target + write_offset, clamped to
/// the rails. No read-back verification is performed.
[[nodiscard]] CellState write_cell(CellState cell, double target, double now,
                                   const DeviceConstants& k, bool endurance_checking = true);

}  // namespace dyncam
