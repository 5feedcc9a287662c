#include "fcm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace fcm {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

json weights_to_json(const WeightMatrix& w) {
  json rows = json::array();
  for (std::size_t j = 0; j < w.n(); ++j) {
    json row = json::array();
    for (std::size_t i = 0; i < w.n(); ++i) row.push_back(w(j, i));
    rows.push_back(std::move(row));
  }
  return json{{"n", w.n()}, {"weights", std::move(rows)}};
}

WeightMatrix weights_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("weights")) {
    throw DataError("weight matrix JSON needs fields \"n\" and \"weights\"");
  }
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) throw DataError("\"n\" must be a positive integer");
  const auto n = j["n"].get<std::size_t>();
  const json& rows = j["weights"];
  if (!rows.is_array() || rows.size() != n) throw DataError("\"weights\" must hold n rows");
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n) {
      throw DataError("weights row " + std::to_string(r) + " must hold n numbers");
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (!rows[r][c].is_number()) {
        throw DataError("weights[" + std::to_string(r) + "][" + std::to_string(c) + "] is not a number");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
    }
  }
  return WeightMatrix(std::move(m));
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

double parse_number(const std::string& cell, std::size_t line, std::size_t column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (cell.empty() || res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
    throw DataError("non-numeric cell '" + cell + "' at " + where(line, column));
  }
  return v;
}

long parse_integer(const std::string& cell, std::size_t line, std::size_t column) {
  long v = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
    throw DataError("expected an integer, got '" + cell + "' at " + where(line, column));
  }
  return v;
}

}  // namespace

std::string weights_to_csv(const WeightMatrix& w) {
  std::string out;
  for (std::size_t j = 0; j < w.n(); ++j) {
    for (std::size_t i = 0; i < w.n(); ++i) {
      if (i) out += ',';
      out += format_double(w(j, i));
    }
    out += '\n';
  }
  return out;
}

WeightMatrix weights_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  const auto lines = split_lines(text);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    if (lines[l].find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(lines[l]);
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c) row.push_back(parse_number(fields[c], l + 1, c + 1));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError("ragged row at line " + std::to_string(l + 1));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty weight matrix CSV");
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (static_cast<Eigen::Index>(rows.front().size()) != n) throw DimensionError("weight matrix CSV is not square");
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return WeightMatrix(std::move(m));
}

void save_weights(const std::filesystem::path& path, const WeightMatrix& w) {
  if (path.extension() == ".csv") {
    write_file(path, weights_to_csv(w));
  } else {
    write_file(path, weights_to_json(w).dump(2) + "\n");
  }
}

WeightMatrix load_weights(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".csv") return weights_from_csv(text);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("invalid JSON in '" + path.string() + "': " + e.what());
  }
  return weights_from_json(j);
}

std::string timeseries_to_csv(const ResponseSet& rs) {
  rs.validate(1);
  std::string out = "seq,t";
  for (std::size_t i = 0; i < rs.n(); ++i) out += ",c" + std::to_string(i + 1);
  out += '\n';
  for (std::size_t s = 0; s < rs.m(); ++s) {
    auto emit = [&](std::size_t t, const auto& row) {
      out += std::to_string(s) + ',' + std::to_string(t);
      for (Eigen::Index i = 0; i < row.size(); ++i) out += ',' + format_double(row(i));
      out += '\n';
    };
    emit(0, rs.initials[s]);
    for (Eigen::Index t = 0; t < rs.sequences[s].rows(); ++t) {
      emit(static_cast<std::size_t>(t) + 1, rs.sequences[s].row(t));
    }
  }
  return out;
}

ResponseSet timeseries_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  std::size_t l = 0;
  while (l < lines.size() && lines[l].find_first_not_of(" \t") == std::string::npos) ++l;
  if (l == lines.size()) throw DataError("time-series CSV is empty");
  const auto header = split_fields(lines[l]);
  if (header.size() < 3 || header[0] != "seq" || header[1] != "t") {
    throw DataError("time-series header must be 'seq,t,c1,...,cn' (line " + std::to_string(l + 1) + ")");
  }
  const std::size_t n = header.size() - 2;

  std::map<long, std::map<long, Vector>> grouped;
  for (++l; l < lines.size(); ++l) {
    if (lines[l].find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(lines[l]);
    if (fields.size() != header.size()) {
      throw DataError("ragged row at line " + std::to_string(l + 1) + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(fields.size()));
    }
    const long seq = parse_integer(fields[0], l + 1, 1);
    const long t = parse_integer(fields[1], l + 1, 2);
    if (t < 0) throw DataError("negative t at " + where(l + 1, 2));
    Vector row(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) row(static_cast<Eigen::Index>(c)) = parse_number(fields[c + 2], l + 1, c + 3);
    if (!grouped[seq].emplace(t, std::move(row)).second) {
      throw DataError("duplicate (seq, t) = (" + std::to_string(seq) + ", " + std::to_string(t) + ") at line " +
                      std::to_string(l + 1));
    }
  }
  if (grouped.empty()) throw DataError("time-series CSV has no data rows");

  ResponseSet rs;
  std::size_t k = 0;
  for (const auto& [seq, rows] : grouped) {
    if (!rows.contains(0)) throw DataError("sequence " + std::to_string(seq) + " has no t=0 row");
    const std::size_t steps = rows.size() - 1;
    if (static_cast<std::size_t>(rows.rbegin()->first) != steps) {
      throw DataError("sequence " + std::to_string(seq) + " has gaps in t");
    }
    if (steps == 0) throw DataError("sequence " + std::to_string(seq) + " has only the t=0 row");
    if (rs.m() == 0) {
      k = steps;
    } else if (steps != k) {
      throw DataError("sequence " + std::to_string(seq) + " has " + std::to_string(steps) + " steps, expected " +
                      std::to_string(k) + " (sequences must be rectangular)");
    }
    Matrix d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
    for (const auto& [t, row] : rows) {
      if (t > 0) d.row(t - 1) = row.transpose();
    }
    rs.initials.push_back(rows.at(0));
    rs.sequences.push_back(std::move(d));
  }
  return rs;
}

void save_timeseries(const std::filesystem::path& path, const ResponseSet& rs) {
  write_file(path, timeseries_to_csv(rs));
}

ResponseSet load_timeseries_csv(const std::filesystem::path& path) {
  return timeseries_from_csv(read_file(path));
}

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

void put_stat(json& j, const std::string& name, const std::optional<Stat>& s) {
  j[name + "Mean"] = s ? json(s->mean) : json(nullptr);
  j[name + "Std"] = s ? json(s->std) : json(nullptr);
}

}  // namespace

json report_to_json(const MetricsReport& r) {
  return json{{"dataError", r.data_error},
              {"outOfSampleError", optional_number(r.out_of_sample_error)},
              {"modelError", optional_number(r.model_error)},
              {"ssMean", optional_number(r.ss_mean)},
              {"executionSeconds", r.execution_seconds}};
}

json aggregate_to_json(const AggregateReport& r) {
  json j = json::object();
  j["trials"] = r.trials;
  put_stat(j, "dataError", r.data_error);
  put_stat(j, "outOfSampleError", r.out_of_sample_error);
  put_stat(j, "modelError", r.model_error);
  put_stat(j, "ssMean", r.ss_mean);
  put_stat(j, "executionSeconds", r.execution_seconds);
  return j;
}

}  // namespace fcm
