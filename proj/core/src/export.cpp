#include "hopcap/export.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include "hopcap/error.hpp"
#include "json.hpp"

namespace hopcap {

using nlohmann::json;

std::string format_real(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::string& kind, std::vector<std::string> columns)
    : os_(os), columns_(columns.size()) {
  os_ << "# hopcap " << kind << " schema v" << kCsvSchemaVersion << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    os_ << (i ? "," : "") << columns[i];
  }
  os_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (in_row_++ > 0) {
    os_ << ',';
  }
  if (s.find_first_of(",\"\n") != std::string::npos) {
    os_ << '"';
    for (char ch : s) {
      os_ << (ch == '"' ? "\"\"" : std::string(1, ch));
    }
    os_ << '"';
  } else {
    os_ << s;
  }
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_real(v)); }

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw ArgumentError("CsvWriter: row has " + std::to_string(in_row_) + " cells, expected " +
                        std::to_string(columns_));
  }
  os_ << '\n';
  in_row_ = 0;
}

namespace {

json vec(const SpherePoint& p) {
  const Vec3& d = p.direction();
  return json::array({d.x, d.y, d.z});
}

SpherePoint point_from(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError("expected a unit vector [x, y, z]");
  }
  try {
    return SpherePoint::from_unit({j[0].get<double>(), j[1].get<double>(), j[2].get<double>()});
  } catch (const GeometryError& e) {
    throw ConfigError(e.what());
  }
}

json parse(std::istream& is, const char* what) {
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

template <class T>
T field(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) {
    throw ConfigError(std::string(what) + ": missing '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": bad '" + key + "': " + e.what());
  }
}

}  // namespace

void write_deployment_json(std::ostream& os, const Deployment& dep) {
  json j;
  j["format"] = "hopcap.deployment";
  j["n"] = dep.n;
  j["seed"] = dep.seed;
  json nodes = json::array();
  for (const auto& p : dep.nodes) {
    nodes.push_back(vec(p));
  }
  j["nodes"] = std::move(nodes);
  os << j.dump() << '\n';
}

Deployment read_deployment_json(std::istream& is) {
  const json j = parse(is, "deployment");
  Deployment dep;
  dep.n = field<std::size_t>(j, "n", "deployment");
  dep.seed = field<std::uint64_t>(j, "seed", "deployment");
  const json nodes = field<json>(j, "nodes", "deployment");
  for (const auto& p : nodes) {
    dep.nodes.push_back(point_from(p));
  }
  if (dep.nodes.size() != dep.n) {
    throw ConfigError("deployment: node count does not match n");
  }
  return dep;
}

void write_tessellation_json(std::ostream& os, const Tessellation& t) {
  json j;
  j["format"] = "hopcap.tessellation";
  j["rho"] = t.rho();
  json centers = json::array();
  for (const auto& c : t.centers()) {
    centers.push_back(vec(c));
  }
  j["centers"] = std::move(centers);
  j["cell_of_node"] = t.cell_of_node();
  os << j.dump() << '\n';
}

Tessellation read_tessellation_json(std::istream& is, const Deployment& dep) {
  const json j = parse(is, "tessellation");
  const double rho = field<double>(j, "rho", "tessellation");
  std::vector<SpherePoint> centers;
  for (const auto& c : field<json>(j, "centers", "tessellation")) {
    centers.push_back(point_from(c));
  }
  const auto assignment = field<std::vector<CellId>>(j, "cell_of_node", "tessellation");
  Tessellation t = Tessellation::from_centers(std::move(centers), rho, dep.nodes);
  if (assignment != t.cell_of_node()) {
    throw ConfigError("tessellation: stored node assignment does not match the deployment");
  }
  return t;
}

void write_schedule_json(std::ostream& os, const Schedule& s) {
  json j;
  j["format"] = "hopcap.schedule";
  j["regime"] = to_string(s.regime());
  j["delta"] = s.delta();
  j["growth"] = s.growth();
  j["num_colors"] = s.num_colors();
  j["colors"] = s.colors();
  os << j.dump() << '\n';
}

Schedule read_schedule_json(std::istream& is) {
  const json j = parse(is, "schedule");
  const auto regime_id = field<std::string>(j, "regime", "schedule");
  Regime regime;
  if (regime_id == "fixed") {
    regime = Regime::fixed;
  } else if (regime_id == "conservative") {
    regime = Regime::conservative;
  } else {
    throw ConfigError("schedule: unknown regime '" + regime_id + "'");
  }
  return Schedule::from_colors(field<std::vector<std::size_t>>(j, "colors", "schedule"),
                               field<std::size_t>(j, "num_colors", "schedule"),
                               field<double>(j, "delta", "schedule"), regime,
                               field<std::string>(j, "growth", "schedule"));
}

void write_routes_json(std::ostream& os, const std::vector<Route>& routes, double rho) {
  json j;
  j["format"] = "hopcap.routes";
  j["rho"] = rho;
  json list = json::array();
  for (const Route& r : routes) {
    json hops = json::array();
    for (const Hop& h : r.hops) {
      hops.push_back(h.length);
    }
    list.push_back({{"connection", r.connection},
                    {"cells", r.cells},
                    {"relays", r.relays},
                    {"hop_lengths", std::move(hops)},
                    {"H", r.hop_count()},
                    {"L", r.geodesic_length},
                    {"L_hat", r.path_length}});
  }
  j["routes"] = std::move(list);
  os << j.dump(1) << '\n';
}

void write_verification_csv(std::ostream& os, const VerificationReport& rep) {
  CsvWriter w(os, "verification", {"check", "connection", "lhs", "rhs", "pass"});
  for (const CheckRow& r : rep.rows) {
    w.cell(r.check).cell(static_cast<std::uint64_t>(r.connection)).cell(r.lhs).cell(r.rhs).cell(
        r.pass);
    w.end_row();
  }
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
  CsvWriter w(os, "trace",
              {"slot", "cell", "tx", "rx", "route", "hop", "sinr", "nearest_interferer", "dummy",
               "success"});
  for (const TraceRecord& r : trace) {
    w.cell(r.slot).cell(static_cast<std::uint64_t>(r.cell)).cell(static_cast<std::uint64_t>(r.tx));
    w.cell(static_cast<std::uint64_t>(r.rx));
    if (r.route == std::numeric_limits<std::uint32_t>::max()) {
      w.cell(std::string("-"));
    } else {
      w.cell(static_cast<std::uint64_t>(r.route));
    }
    w.cell(static_cast<std::uint64_t>(r.hop)).cell(r.sinr).cell(r.nearest_interferer);
    w.cell(r.dummy).cell(r.success);
    w.end_row();
  }
}

}  // namespace hopcap
