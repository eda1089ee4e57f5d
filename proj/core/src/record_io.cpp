#include "mimo_switch/record_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace mimo_switch {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ContractViolation("bad number '" + s + "' in CSV");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ContractViolation("bad integer '" + s + "' in CSV");
  return v;
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const SweepRecord& r) {
  out << r.scheme << ',' << (r.pnc ? 1 : 0) << ',' << format_double(r.snr_db) << ',' << r.pattern_id
      << ',' << r.trial << ',' << format_double(r.sum_mse) << ',' << format_double(r.sum_rate_bits)
      << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.wall_time_us << '\n';
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  write_csv_header(out);
  for (const auto& r : records) write_csv_row(out, r);
}

std::vector<SweepRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ContractViolation("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ContractViolation("unexpected CSV header");
  std::vector<SweepRecord> out;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw ContractViolation("CSV row has " + std::to_string(f.size()) + " fields");
    SweepRecord r;
    r.scheme = f[0];
    r.pnc = parse_int(f[1]) != 0;
    r.snr_db = parse_double(f[2]);
    r.pattern_id = f[3];
    r.trial = static_cast<int>(parse_int(f[4]));
    r.sum_mse = parse_double(f[5]);
    r.sum_rate_bits = parse_double(f[6]);
    r.iterations = static_cast<int>(parse_int(f[7]));
    r.converged = parse_int(f[8]) != 0;
    r.wall_time_us = parse_int(f[9]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_json(std::ostream& out, const std::vector<SweepRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j{{"scheme", r.scheme},
                     {"pnc", r.pnc},
                     {"snr_db", r.snr_db},
                     {"pattern_id", r.pattern_id},
                     {"trial", r.trial},
                     {"sum_mse", number(r.sum_mse)},
                     {"sum_rate_bits", number(r.sum_rate_bits)},
                     {"iterations", r.iterations},
                     {"converged", r.converged},
                     {"wall_time_us", r.wall_time_us}};
    if (!r.error.empty()) j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  out << arr.dump(1) << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "scheme,pnc,snr_db,count,failures,sum_mse_mean,sum_mse_std,sum_rate_bits_mean,"
         "sum_rate_bits_std,iterations_mean,iterations_std\n";
  for (const auto& r : rows)
    out << r.scheme << ',' << (r.pnc ? 1 : 0) << ',' << format_double(r.snr_db) << ',' << r.count << ','
        << r.failures << ',' << format_double(r.sum_mse.mean) << ',' << format_double(r.sum_mse.std)
        << ',' << format_double(r.sum_rate_bits.mean) << ',' << format_double(r.sum_rate_bits.std)
        << ',' << format_double(r.iterations.mean) << ',' << format_double(r.iterations.std) << '\n';
}

}  // namespace mimo_switch
