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

namespace dyncam {

enum class EventKind { kRowWrite, kSearch };

/// One ledger entry, compact enough to keep the full history around.
struct LedgerEvent {
    EventKind kind;
    std::uint64_t cells = 0;       ///< row write: cells written
    std::uint64_t matches = 0;     ///< search: matching cells
    std::uint64_t mismatches = 0;  ///< search: mismatching cells
};

/// Per-event costs in integer attojoules / femtoseconds. Accumulating in
/// integers makes the ledger identities exact; doubles are derived views.
struct LedgerCosts {
    std::int64_t e_write_aj = 0;
    std::int64_t e_match_aj = 0;
    std::int64_t e_mismatch_aj = 0;
    std::int64_t t_read_fs = 0;
    std::int64_t t_write_row_fs = 0;

    static LedgerCosts from(const DeviceConstants& k);
};

/// Cumulative energy/latency accounting by event class. Peripheral (DAC,
/// ADC, controller) costs are not modeled.
class EnergyLedger {
public:
    EnergyLedger() : EnergyLedger(LedgerCosts::from(DeviceConstants{})) {}
    explicit EnergyLedger(LedgerCosts costs) : costs_(costs) {}

    void record_row_write(std::uint64_t cells);
    void record_search(std::uint64_t matches, std::uint64_t mismatches);
    void reset();

    std::uint64_t write_events() const { return write_events_; }
    std::uint64_t match_events() const { return match_events_; }
    std::uint64_t mismatch_events() const { return mismatch_events_; }
    std::uint64_t searches() const { return searches_; }
    std::uint64_t row_writes() const { return row_writes_; }

    std::int64_t total_energy_aj() const { return energy_aj_; }
    std::int64_t total_latency_fs() const { return latency_fs_; }
    double total_energy_j() const { return static_cast<double>(energy_aj_) * 1e-18; }
    double total_latency_s() const { return static_cast<double>(latency_fs_) * 1e-15; }

    const LedgerCosts& costs() const { return costs_; }
    const std::vector<LedgerEvent>& events() const { return events_; }

    struct Totals {
        std::uint64_t write_events = 0, match_events = 0, mismatch_events = 0;
        std::uint64_t searches = 0, row_writes = 0;
        std::int64_t energy_aj = 0;
        std::int64_t latency_fs = 0;
    };
    /// Recompute everything from the event log alone; must equal the
    /// accumulated tallies exactly.
    Totals replay() const;

    /// Closed-form identity: write_events*e_write + match_events*e_match +
    /// mismatch_events*e_mismatch, in attojoules.
    std::int64_t closed_form_energy_aj() const;
    std::int64_t closed_form_latency_fs() const;

private:
    LedgerCosts costs_;
    std::uint64_t write_events_ = 0;
    std::uint64_t match_events_ = 0;
    std::uint64_t mismatch_events_ = 0;
    std::uint64_t searches_ = 0;
    std::uint64_t row_writes_ = 0;
    std::int64_t energy_aj_ = 0;
    std::int64_t latency_fs_ = 0;
    std::vector<LedgerEvent> events_;
};

/// Mean per-cell search energy when store and query values are uniformly
/// distributed over n_intervals levels: P(match) = 1/N.
double expected_search_energy_per_cell(std::uint64_t n_intervals, const DeviceConstants& k);

/// avg_energy_j spread over the bit width of one cell.
double energy_per_bit(double avg_energy_j, std::uint64_t bits);

/// Flat summary of a ledger with the derived cost figures.
struct LedgerReport {
    std::uint64_t write_events = 0, match_events = 0, mismatch_events = 0;
    std::uint64_t searches = 0, row_writes = 0;
    double total_energy_j = 0.0;
    double total_latency_s = 0.0;
    double mean_search_energy_per_cell_j = 0.0;  ///< 0 when no searches ran
    double energy_per_search_per_bit_j = 0.0;
    double throughput_searches_per_s = 0.0;  ///< 0 when no latency accrued
};

LedgerReport make_report(const EnergyLedger& ledger, std::uint64_t bits = 3);
std::string report_to_text(const LedgerReport& r);
std::string report_to_csv(const LedgerReport& r);

}  // namespace dyncam
