#include "permugibbs/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace permugibbs {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) { row(header); }

void CsvTable::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::invalid_argument("csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += csv_field(fields[i]);
  }
  out_ += '\n';
}

std::string format_key(const ObsKey& key) {
  std::string s;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) s += '|';
    s += std::to_string(key[i]);
  }
  return s;
}

std::string permutation_csv(const WindowPermutation& sigma) {
  std::string out = "# boundary=" + sigma.boundary().describe() + "\n";
  CsvTable t({"x", "sigma_x"});
  for (Index x = sigma.core().lo; x <= sigma.core().hi; ++x) {
    t.row({std::to_string(x), std::to_string(sigma(x))});
  }
  return out + t.str();
}

std::string points_csv(const std::vector<double>& coords) {
  CsvTable t({"coord"});
  for (double x : coords) t.row({format_double(x)});
  return t.str();
}

std::string table_csv(const SpecificationTable& table) {
  CsvTable t({"state_id", "energy", "probability", "flow"});
  const bool finite = table.boundary().finite_flow();
  const std::string fixed = table.boundary().flow().str();
  for (std::size_t s = 0; s < table.size(); ++s) {
    t.row({std::to_string(s), format_double(table.energy(s)), format_double(table.probability(s)),
           finite ? table.flow(s).str() : fixed});
  }
  return t.str();
}

std::string empirical_csv(const EmpiricalDistribution& dist) {
  CsvTable t({"observable", "value", "count", "freq", "stderr"});
  for (std::size_t i = 0; i < dist.names().size(); ++i) {
    for (const auto& [key, c] : dist.counts(i)) {
      t.row({dist.names()[i], format_key(key), std::to_string(dist.count(i, key)),
             format_double(dist.frequency(i, key)), format_double(dist.standard_error(i, key))});
    }
  }
  return t.str();
}

std::string report_csv(const std::vector<CheckReport>& reports) {
  CsvTable t({"check_id", "params", "bound", "observed", "margin", "pass"});
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      t.row({r.id, row.params, format_double(row.bound), format_double(row.observed),
             format_double(row.margin), row.pass ? "true" : "false"});
    }
  }
  return t.str();
}

std::string scan_csv(const ScanResult& scan, bool coupling) {
  CsvTable t({"kind", "volume_a", "volume_b", "tv", "stderr"});
  for (std::size_t i = 0; i < scan.tv.size(); ++i) {
    if (coupling) {
      t.row({"coupling", scan.volumes[i].describe(), scan.volumes[i].describe(),
             format_double(scan.tv[i]), format_double(scan.tv_stderr[i])});
    } else {
      t.row({"successive", scan.volumes[i].describe(), scan.volumes[i + 1].describe(),
             format_double(scan.tv[i]), format_double(scan.tv_stderr[i])});
    }
  }
  if (!coupling) {
    for (std::size_t i = 0; i < scan.volumes.size(); ++i) {
      for (std::size_t k = i + 1; k < scan.volumes.size(); ++k) {
        t.row({"pairwise", scan.volumes[i].describe(), scan.volumes[k].describe(),
               format_double(scan.pairwise[i][k]), ""});
      }
    }
  }
  return t.str();
}

}  // namespace permugibbs
