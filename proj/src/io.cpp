#include "dmcore/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dmcore/errors.hpp"

namespace dmcore {

namespace {

bool looks_gzip(const std::string& data) {
  return data.size() >= 2 && static_cast<unsigned char>(data[0]) == 0x1f &&
         static_cast<unsigned char>(data[1]) == 0x8b;
}

std::string gunzip(const std::string& data) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (inflateInit2(&zs, 15 + 16) != Z_OK)
    throw validation_error("failed to initialize gzip decoder");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 16];
  int ret;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    ret = inflate(&zs, Z_NO_FLUSH);
    if (ret != Z_OK && ret != Z_STREAM_END) {
      inflateEnd(&zs);
      throw validation_error("gzip input is corrupt");
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
  } while (ret != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
  if (b == e) return false;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool numeric_row(const std::vector<std::string>& row) {
  double v;
  for (const auto& cell : row)
    if (!parse_double(cell, v)) return false;
  return true;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string data = ss.str();
  return looks_gzip(data) ? gunzip(data) : data;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open output file: " + path);
  out << content;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool any = false;
  for (char c : text) {
    if (c == '\r') continue;
    if (c == ',') {
      row.push_back(cell);
      cell.clear();
      any = true;
    } else if (c == '\n') {
      if (any || !cell.empty()) {
        row.push_back(cell);
        rows.push_back(row);
      }
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
      any = any || !std::isspace(static_cast<unsigned char>(c));
    }
  }
  if (any || !cell.empty()) {
    row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

MetricSpace load_metric_csv(const std::string& text, InputFormat format) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw validation_error("empty input");

  std::size_t start = 0;
  bool has_header = !numeric_row(rows[0]);
  if (has_header) start = 1;
  if (start >= rows.size()) throw validation_error("input has no data rows");

  if (format == InputFormat::kMatrix) {
    std::size_t n = rows.size() - start;
    std::vector<double> flat;
    flat.reserve(n * n);
    for (std::size_t r = start; r < rows.size(); ++r) {
      if (rows[r].size() != n)
        throw validation_error("distance matrix is not square");
      for (const auto& cell : rows[r]) {
        double v;
        if (!parse_double(cell, v))
          throw validation_error("non-numeric matrix entry: " + cell);
        flat.push_back(v);
      }
    }
    return MetricSpace::from_distance_matrix(std::move(flat),
                                             static_cast<int>(n));
  }

  // coordinate table; optional id column by header name
  int id_col = -1;
  if (has_header) {
    for (std::size_t c = 0; c < rows[0].size(); ++c) {
      std::string name = rows[0][c];
      std::transform(name.begin(), name.end(), name.begin(), ::tolower);
      if (name == "id") id_col = static_cast<int>(c);
    }
  }
  std::vector<std::pair<double, std::vector<double>>> keyed;
  for (std::size_t r = start; r < rows.size(); ++r) {
    std::vector<double> coords;
    double key = static_cast<double>(r);
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      double v;
      if (!parse_double(rows[r][c], v))
        throw validation_error("non-numeric coordinate: " + rows[r][c]);
      if (static_cast<int>(c) == id_col)
        key = v;
      else
        coords.push_back(v);
    }
    keyed.emplace_back(key, std::move(coords));
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::vector<double>> table;
  table.reserve(keyed.size());
  for (auto& [_, coords] : keyed) table.push_back(std::move(coords));
  return MetricSpace::from_coordinates(std::move(table));
}

MetricSpace load_metric_file(const std::string& path, InputFormat format) {
  return load_metric_csv(read_file(path), format);
}

std::string metric_to_matrix_csv(const MetricSpace& M) {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < M.n(); ++i) {
    for (int j = 0; j < M.n(); ++j) {
      if (j) out << ',';
      out << M.distance(i, j);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace dmcore
