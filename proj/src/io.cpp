#include "qiopa/io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "qiopa/errors.hpp"

namespace qiopa {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::json state_to_json(const StateVector& s, double threshold) {
  nlohmann::json out = nlohmann::json::array();
  const FockBasis& basis = s.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const cplx a = s.amps()[static_cast<Eigen::Index>(i)];
    if (std::abs(a) < threshold) continue;
    out.push_back({{"occupancies", basis[i].n}, {"re", a.real()}, {"im", a.imag()}});
  }
  return out;
}

StateVector state_from_json(const nlohmann::json& j, int cutoff) {
  if (!j.is_array()) throw ContractError("state JSON must be an array");
  std::vector<std::pair<FockState, cplx>> entries;
  int top = 0;
  for (const auto& e : j) {
    FockState ket;
    ket.n = e.at("occupancies").get<std::array<int, 4>>();
    for (int k : ket.n) {
      if (k < 0) throw ContractError("negative occupancy in state JSON");
      top = std::max(top, k);
    }
    entries.emplace_back(ket, cplx(e.at("re").get<double>(), e.at("im").get<double>()));
  }
  StateVector s(make_basis(cutoff < 0 ? top : cutoff));
  for (const auto& [ket, a] : entries) {
    if (!s.basis().contains(ket)) throw BasisError("state JSON entry exceeds the cutoff");
    s.set_amplitude(ket, a);
  }
  return s;
}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw ContractError("row width does not match the columns");
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ContractError("no column named " + name);
  const auto k = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

void write_csv(std::ostream& os, const Table& t,
               const std::vector<std::pair<std::string, std::string>>& header) {
  for (const auto& [k, v] : header) os << "#@ " << k << " = " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
    os << '\n';
  }
}

Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  bool have_columns = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_columns) {
      t.columns = cells;
      have_columns = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc{}) throw ContractError("malformed number in CSV: " + c);
      row.push_back(v);
    }
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace qiopa
