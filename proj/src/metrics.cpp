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

#include "dyncam/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dyncam {

LedgerCosts LedgerCosts::from(const DeviceConstants& k) {
    k.validate();
    LedgerCosts c;
    c.e_write_aj = std::llround(k.e_write * 1e18);
    c.e_match_aj = std::llround(k.e_search_match * 1e18);
    c.e_mismatch_aj = std::llround(k.e_search_mismatch * 1e18);
    c.t_read_fs = std::llround(k.t_read * 1e15);
    c.t_write_row_fs = std::llround(k.t_write_row * 1e15);
    if (c.e_write_aj <= 0 || c.e_match_aj <= 0 || c.e_mismatch_aj <= 0 || c.t_read_fs <= 0 ||
        c.t_write_row_fs <= 0) {
        throw std::invalid_argument("ledger costs: constants below 1 aJ / 1 fs resolution");
    }
    return c;
}

void EnergyLedger::record_row_write(std::uint64_t cells) {
    write_events_ += cells;
    row_writes_ += 1;
    energy_aj_ += static_cast<std::int64_t>(cells) * costs_.e_write_aj;
    latency_fs_ += costs_.t_write_row_fs;
    events_.push_back({EventKind::kRowWrite, cells, 0, 0});
}

void EnergyLedger::record_search(std::uint64_t matches, std::uint64_t mismatches) {
    match_events_ += matches;
    mismatch_events_ += mismatches;
    searches_ += 1;
    energy_aj_ += static_cast<std::int64_t>(matches) * costs_.e_match_aj +
                  static_cast<std::int64_t>(mismatches) * costs_.e_mismatch_aj;
    latency_fs_ += costs_.t_read_fs;
    events_.push_back({EventKind::kSearch, 0, matches, mismatches});
}

void EnergyLedger::reset() {
    write_events_ = match_events_ = mismatch_events_ = searches_ = row_writes_ = 0;
    energy_aj_ = latency_fs_ = 0;
    events_.clear();
}

EnergyLedger::Totals EnergyLedger::replay() const {
    Totals t;
    for (const LedgerEvent& e : events_) {
        switch (e.kind) {
            case EventKind::kRowWrite:
                t.write_events += e.cells;
                t.row_writes += 1;
                t.energy_aj += static_cast<std::int64_t>(e.cells) * costs_.e_write_aj;
                t.latency_fs += costs_.t_write_row_fs;
                break;
            case EventKind::kSearch:
                t.match_events += e.matches;
                t.mismatch_events += e.mismatches;
                t.searches += 1;
                t.energy_aj += static_cast<std::int64_t>(e.matches) * costs_.e_match_aj +
                               static_cast<std::int64_t>(e.mismatches) * costs_.e_mismatch_aj;
                t.latency_fs += costs_.t_read_fs;
                break;
        }
    }
    return t;
}

std::int64_t EnergyLedger::closed_form_energy_aj() const {
    return static_cast<std::int64_t>(write_events_) * costs_.e_write_aj +
           static_cast<std::int64_t>(match_events_) * costs_.e_match_aj +
           static_cast<std::int64_t>(mismatch_events_) * costs_.e_mismatch_aj;
}

std::int64_t EnergyLedger::closed_form_latency_fs() const {
    return static_cast<std::int64_t>(searches_) * costs_.t_read_fs +
           static_cast<std::int64_t>(row_writes_) * costs_.t_write_row_fs;
}

double expected_search_energy_per_cell(std::uint64_t n_intervals, const DeviceConstants& k) {
    if (n_intervals == 0) {
        throw std::invalid_argument("expected_search_energy_per_cell: n_intervals must be >= 1");
    }
    const double p = 1.0 / static_cast<double>(n_intervals);
    return p * k.e_search_match + (1.0 - p) * k.e_search_mismatch;
}

double energy_per_bit(double avg_energy_j, std::uint64_t bits) {
    if (bits == 0) {
        throw std::invalid_argument("energy_per_bit: bits must be >= 1");
    }
    return avg_energy_j / static_cast<double>(bits);
}

LedgerReport make_report(const EnergyLedger& ledger, std::uint64_t bits) {
    LedgerReport r;
    r.write_events = ledger.write_events();
    r.match_events = ledger.match_events();
    r.mismatch_events = ledger.mismatch_events();
    r.searches = ledger.searches();
    r.row_writes = ledger.row_writes();
    r.total_energy_j = ledger.total_energy_j();
    r.total_latency_s = ledger.total_latency_s();
    const std::uint64_t search_cells = r.match_events + r.mismatch_events;
    if (search_cells > 0) {
        const std::int64_t search_aj =
            static_cast<std::int64_t>(r.match_events) * ledger.costs().e_match_aj +
            static_cast<std::int64_t>(r.mismatch_events) * ledger.costs().e_mismatch_aj;
        r.mean_search_energy_per_cell_j =
            static_cast<double>(search_aj) * 1e-18 / static_cast<double>(search_cells);
        r.energy_per_search_per_bit_j = energy_per_bit(r.mean_search_energy_per_cell_j, bits);
    }
    if (ledger.total_latency_fs() > 0) {
        r.throughput_searches_per_s = static_cast<double>(r.searches) / r.total_latency_s;
    }
    return r;
}

namespace {

std::string fmt_line(const char* key, double v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-28s %.17g\n", key, v);
    return buf;
}

std::string fmt_line(const char* key, std::uint64_t v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-28s %llu\n", key, static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string report_to_text(const LedgerReport& r) {
    std::string out;
    out += fmt_line("row_writes", r.row_writes);
    out += fmt_line("searches", r.searches);
    out += fmt_line("write_events", r.write_events);
    out += fmt_line("match_events", r.match_events);
    out += fmt_line("mismatch_events", r.mismatch_events);
    out += fmt_line("total_energy_J", r.total_energy_j);
    out += fmt_line("total_latency_s", r.total_latency_s);
    out += fmt_line("mean_search_energy_per_cell_J", r.mean_search_energy_per_cell_j);
    out += fmt_line("energy_per_search_per_bit_J", r.energy_per_search_per_bit_j);
    out += fmt_line("throughput_searches_per_s", r.throughput_searches_per_s);
    return out;
}

std::string report_to_csv(const LedgerReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "row_writes,searches,write_events,match_events,mismatch_events,"
                  "total_energy_J,total_latency_s,mean_search_energy_per_cell_J,"
                  "energy_per_search_per_bit_J,throughput_searches_per_s\n"
                  "%llu,%llu,%llu,%llu,%llu,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(r.row_writes),
                  static_cast<unsigned long long>(r.searches),
                  static_cast<unsigned long long>(r.write_events),
                  static_cast<unsigned long long>(r.match_events),
                  static_cast<unsigned long long>(r.mismatch_events), r.total_energy_j,
                  r.total_latency_s, r.mean_search_energy_per_cell_j,
                  r.energy_per_search_per_bit_j, r.throughput_searches_per_s);
    return buf;
}

}  // namespace dyncam
