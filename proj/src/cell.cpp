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

#include "dyncam/cell.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyncam/errors.hpp"

namespace dyncam {

void DeviceConstants::validate() const {
    if (!(i_match > match_threshold_current && match_threshold_current > i_mismatch)) {
        throw std::invalid_argument(
            "device constants: need i_match > match_threshold_current > i_mismatch");
    }
    if (!(e_search_match > 0.0 && e_search_mismatch > 0.0 && e_write > 0.0)) {
        throw std::invalid_argument("device constants: energies must be strictly positive");
    }
    if (!(t_read > 0.0 && t_write_row > 0.0)) {
        throw std::invalid_argument("device constants: times must be strictly positive");
    }
    if (!(retention_droop_rate >= 0.0)) {
        throw std::invalid_argument("device constants: droop rate must be non-negative");
    }
    if (!(vdd > 0.0)) {
        throw std::invalid_argument("device constants: vdd must be positive");
    }
}

LevelSet LevelSet::default_levels() {
    LevelSet ls;
    ls.voltages.resize(8);
    for (std::size_t i = 0; i < 8; ++i) {
        ls.voltages[i] = 0.25 + 0.05 * static_cast<double>(i);
    }
    ls.v_range_default = 0.05;
    return ls;
}

double LevelSet::spacing() const {
    if (voltages.size() < 2) {
        throw std::invalid_argument("level set: spacing needs at least two levels");
    }
    return voltages[1] - voltages[0];
}

double LevelSet::nearest(double v) const {
    return voltages[nearest_index(v)];
}

std::size_t LevelSet::nearest_index(double v) const {
    if (voltages.empty()) {
        throw std::invalid_argument("level set: empty");
    }
    std::size_t best = 0;
    double best_d = std::abs(v - voltages[0]);
    for (std::size_t i = 1; i < voltages.size(); ++i) {
        const double d = std::abs(v - voltages[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

void LevelSet::validate() const {
    if (voltages.empty()) {
        throw std::invalid_argument("level set: at least one level required");
    }
    if (!(v_range_default >= 0.0)) {
        throw std::invalid_argument("level set: v_range_default must be non-negative");
    }
    if (voltages.size() >= 2) {
        const double delta = voltages[1] - voltages[0];
        if (!(delta > 0.0)) {
            throw std::invalid_argument("level set: levels must be strictly increasing");
        }
        for (std::size_t i = 1; i < voltages.size(); ++i) {
            const double step = voltages[i] - voltages[i - 1];
            if (!(step > 0.0)) {
                throw std::invalid_argument("level set: levels must be strictly increasing");
            }
            if (std::abs(step - delta) > 1e-6) {  // uniform within 1 uV
                throw std::invalid_argument("level set: spacing must be uniform within 1 uV");
            }
        }
        if (v_range_default > delta) {
            throw std::invalid_argument(
                "level set: v_range_default must not exceed the level spacing");
        }
    }
}

VoltageWindow search_window(double vdl, double v_range) {
    if (v_range < 0.0) {
        throw std::invalid_argument("search_window: v_range must be non-negative");
    }
    return {vdl - v_range / 2.0, vdl + v_range / 2.0};
}

double effective_stored_voltage(const CellState& cell, double now, const DeviceConstants& k) {
    if (now < cell.last_write_time) {
        throw std::invalid_argument("effective_stored_voltage: now precedes the last write");
    }
    const double v = cell.v_store - k.retention_droop_rate * (now - cell.last_write_time);
    return v > 0.0 ? v : 0.0;
}

bool cell_match(const CellState& cell, const VoltageWindow& w, double now,
                const DeviceConstants& k, double noise_low, double noise_high) {
    if (!(w.low <= w.high)) {
        throw std::invalid_argument("cell_match: inverted window");
    }
    const double v = effective_stored_voltage(cell, now, k);
    // Strict inequalities: equality at either bound is a mismatch.
    return v > w.low + cell.offset_low + noise_low && v < w.high + cell.offset_high + noise_high;
}

double cell_current(bool is_match, const DeviceConstants& k) {
    return is_match ? k.i_match : k.i_mismatch;
}

CellState write_cell(CellState cell, double target, double now, const DeviceConstants& k,
                     bool endurance_checking) {
    if (!(target >= 0.0 && target <= k.vdd)) {
        throw std::invalid_argument("write_cell: target outside the rail range");
    }
    if (endurance_checking && cell.write_count >= k.endurance_limit) {
        throw EnduranceError("write_cell: endurance limit reached");
    }
    cell.v_store = std::clamp(target + cell.write_offset, 0.0, k.vdd);
    cell.last_write_time = now;
    ++cell.write_count;
    return cell;
}

}  // namespace dyncam
