#include "app/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

namespace rankreg::app {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty() || s == "NA" || s == "NaN" || s == "nan") return std::nullopt;
  const char* first = s.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

Ingested ingest_csv(std::istream& in, const ColumnSpec& cols, Spec spec) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("input is empty (no header line)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < header.size(); ++k) index.emplace(trim(header[k]), k);
  auto column = [&](const std::string& name) {
    const auto it = index.find(name);
    if (it == index.end()) throw DataError("column '" + name + "' not found in the header");
    return it->second;
  };

  const bool use_x = spec != Spec::RankLevel;
  const std::size_t iy = column(cols.y);
  const std::size_t ix = use_x ? column(cols.x) : 0;
  std::vector<std::size_t> iw;
  for (const auto& name : cols.w) iw.push_back(column(name));
  std::optional<std::size_t> ig;
  if (cols.group) ig = column(*cols.group);

  std::vector<double> ys, xs;
  std::vector<std::vector<double>> ws(iw.size());
  std::vector<std::string> gs;
  Ingested out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++out.rows_read;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(f.size()));
    }
    std::string missing;
    auto take = [&](std::size_t k, const std::string& name) {
      const auto v = parse_number(f[k]);
      if (!v && missing.empty()) missing = name;
      return v.value_or(0.0);
    };
    const double y = take(iy, cols.y);
    const double x = use_x ? take(ix, cols.x) : 0.0;
    std::vector<double> w(iw.size());
    for (std::size_t k = 0; k < iw.size(); ++k) w[k] = take(iw[k], cols.w[k]);
    std::string g;
    if (ig) {
      g = trim(f[*ig]);
      if ((g.empty() || g == "NA") && missing.empty()) missing = *cols.group;
    }
    if (!missing.empty()) {
      if (!cols.drop_missing) {
        throw DataError("line " + std::to_string(line_no) + ": missing or non-numeric value in column '" +
                        missing + "' (use --drop-missing to skip such rows)");
      }
      ++out.rows_dropped;
      continue;
    }
    ys.push_back(y);
    if (use_x) xs.push_back(x);
    for (std::size_t k = 0; k < iw.size(); ++k) ws[k].push_back(w[k]);
    if (ig) gs.push_back(std::move(g));
  }
  if (ys.empty()) throw DataError("no usable data rows");

  const auto n = static_cast<Eigen::Index>(ys.size());
  Dataset& d = out.data;
  d.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
  if (use_x) d.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), n);
  const Eigen::Index offset = cols.intercept ? 1 : 0;
  d.w.resize(n, offset + static_cast<Eigen::Index>(iw.size()));
  if (cols.intercept) {
    d.w.col(0).setOnes();
    d.w_names.push_back("intercept");
  }
  for (std::size_t k = 0; k < iw.size(); ++k) {
    d.w.col(offset + static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXd>(ws[k].data(), n);
    d.w_names.push_back(cols.w[k]);
  }
  if (ig) d.groups = GroupLabels::from_strings(gs);
  return out;
}

Ingested ingest_csv_file(const std::string& path, const ColumnSpec& cols, Spec spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return ingest_csv(in, cols, spec);
}

}  // namespace rankreg::app
