#include "trem/csv.h"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "trem/errors.h"

namespace trem {

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot open for writing: " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw FileError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw FileError("rename failed for " + path.string() + ": " + ec.message());
  }
}

std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string feature_csv_text(const FeatureMatrix& m) {
  std::string out;
  out.reserve(m.rows() * m.cols() * 12 + 1024);
  out += "time_s";
  for (const std::string& name : m.names) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += format_full(m.timestamps[r]);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out += ',';
      out += format_full(m.at(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m) {
  atomic_write_text(path, feature_csv_text(m));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("malformed number '" + s + "' at " + path.string() + ":" +
                std::to_string(lineno));
  }
}

}  // namespace

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "time_s") {
    throw Error("bad feature CSV header (expected time_s,<names...>): " + path.string());
  }

  FeatureMatrix m;
  m.names.assign(header.begin() + 1, header.end());
  m.source_id = path.stem().string();

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error("row with " + std::to_string(fields.size()) + " fields (expected " +
                  std::to_string(header.size()) + ") at " + path.string() + ":" +
                  std::to_string(lineno));
    }
    m.timestamps.push_back(parse_double(fields[0], path, lineno));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      m.data.push_back(parse_double(fields[c], path, lineno));
    }
  }
  if (m.rows() >= 2) {
    const double dt = m.timestamps[1] - m.timestamps[0];
    if (dt > 0.0) m.feature_rate = 1.0 / dt;
  }
  return m;
}

void write_events_csv(const std::filesystem::path& path, const EventList& ev) {
  std::string out = "onset_s,peak_value\n";
  for (std::size_t i = 0; i < ev.onsets.size(); ++i) {
    out += format_full(ev.onsets[i]);
    out += ',';
    out += format_full(ev.peak_values[i]);
    out += '\n';
  }
  atomic_write_text(path, out);
}

void write_control_csv(const std::filesystem::path& path, const ControlBuffer& cb) {
  std::string out = "index,time_s,value\n";
  for (const ControlEntry& e : cb.entries) {
    out += std::to_string(e.index);
    out += ',';
    out += format_full(e.time_s);
    out += ',';
    out += format_full(e.value);
    out += '\n';
  }
  atomic_write_text(path, out);
}

ControlBuffer read_control_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV: " + path.string());
  ControlBuffer cb;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw Error("bad control row at " + path.string() + ":" + std::to_string(lineno));
    }
    ControlEntry e;
    e.index = static_cast<std::size_t>(parse_double(fields[0], path, lineno));
    e.time_s = parse_double(fields[1], path, lineno);
    e.value = parse_double(fields[2], path, lineno);
    cb.entries.push_back(e);
  }
  return cb;
}

}  // namespace trem
