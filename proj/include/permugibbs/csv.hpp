#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "permugibbs/experiments.hpp"
#include "permugibbs/sampler.hpp"

namespace permugibbs {

/// Shortest round-trip decimal form ('.' separator, "inf"/"-inf"/"nan").
std::string format_double(double x);

/// Quotes a field when it holds a comma, quote or newline.
std::string csv_field(std::string_view s);

/// In-memory CSV with LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  std::string str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

/// "a|b|c"
std::string format_key(const ObsKey& key);

/// "# boundary=..." line, then x,sigma_x over the core window.
std::string permutation_csv(const WindowPermutation& sigma);
std::string points_csv(const std::vector<double>& coords);
std::string table_csv(const SpecificationTable& table);
std::string empirical_csv(const EmpiricalDistribution& dist);
std::string report_csv(const std::vector<CheckReport>& reports);
std::string scan_csv(const ScanResult& scan, bool coupling);

}  // namespace permugibbs
