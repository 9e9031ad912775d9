#pragma once

#include <concepts>
#include <iosfwd>
#include <string>
#include <vector>

#include "hopcap/engine.hpp"
#include "hopcap/routing.hpp"
#include "hopcap/schedule.hpp"
#include "hopcap/tessellation.hpp"
#include "hopcap/verification.hpp"

namespace hopcap {

inline constexpr int kCsvSchemaVersion = 1;

// Deterministic CSV: a "# hopcap <kind> schema v<N>" comment row, a header,
// then rows. Reals are printed with %.12g; infinities as inf/-inf.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::string& kind, std::vector<std::string> columns);

  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(const char* s) { return cell(std::string(s)); }
  CsvWriter& cell(bool v) { return cell(std::string(v ? "1" : "0")); }
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  CsvWriter& cell(T v) {
    return cell(std::to_string(v));
  }
  // Ends the row; throws ArgumentError if the cell count does not match.
  void end_row();

 private:
  std::ostream& os_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

std::string format_real(double v);

// JSON round trips. Imports validate shape and throw ConfigError on malformed
// input.
void write_deployment_json(std::ostream& os, const Deployment& dep);
Deployment read_deployment_json(std::istream& is);

// Centers as unit vectors, rho, and the node-to-cell assignment. Import
// rebuilds from the centers and checks the stored assignment against the
// deployment.
void write_tessellation_json(std::ostream& os, const Tessellation& t);
Tessellation read_tessellation_json(std::istream& is, const Deployment& dep);

void write_schedule_json(std::ostream& os, const Schedule& s);
Schedule read_schedule_json(std::istream& is);

// Per-connection listing: cells, relays and hop lengths.
void write_routes_json(std::ostream& os, const std::vector<Route>& routes, double rho);

// Columns: check, connection, lhs, rhs, pass.
void write_verification_csv(std::ostream& os, const VerificationReport& rep);

// Columns: slot, cell, tx, rx, route, hop, sinr, nearest_interferer, dummy, success.
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace);

}  // namespace hopcap
