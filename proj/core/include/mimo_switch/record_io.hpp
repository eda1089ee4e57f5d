#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mimo_switch/experiments.hpp"

namespace mimo_switch {

// Shortest round-trip decimal form; "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double value);

inline constexpr const char* kCsvHeader =
    "scheme,pnc,snr_db,pattern_id,trial,sum_mse,sum_rate_bits,iterations,converged,wall_time_us";

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SweepRecord& r);
void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_csv(std::istream& in);

void write_json(std::ostream& out, const std::vector<SweepRecord>& records);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace mimo_switch
