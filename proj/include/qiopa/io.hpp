#ifndef QIOPA_IO_HPP
#define QIOPA_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qiopa/fock.hpp"

namespace qiopa {

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// [{"occupancies": [n1h, n2v, n1v, n2h], "re": .., "im": ..}, ...] in basis
/// order; amplitudes with modulus below `threshold` are omitted.
nlohmann::json state_to_json(const StateVector& s, double threshold = 1e-14);

/// Inverse of state_to_json. A negative cutoff picks the largest occupancy
/// present. BasisError when an entry does not fit the cutoff.
StateVector state_from_json(const nlohmann::json& j, int cutoff = -1);

/// Rectangular numeric table with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  /// Column values by name; ContractError when absent.
  std::vector<double> column(const std::string& name) const;
};

/// Header lines are written as "#@ key = value", then the column names, then
/// one comma-separated line per row.
void write_csv(std::ostream& os, const Table& t,
               const std::vector<std::pair<std::string, std::string>>& header);

/// Reads a table written by write_csv; "#" lines are skipped.
Table read_csv(std::istream& is);

}  // namespace qiopa

#endif  // QIOPA_IO_HPP
