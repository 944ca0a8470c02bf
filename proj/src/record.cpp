#include "saea/record.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "saea/error.hpp"

namespace saea {

namespace {

constexpr std::string_view kMagic = "# saea-run-record v1";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) raise(ErrorCode::kIoError, "malformed number '" + s + "' in run record");
  return v;
}

std::size_t parse_size(const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  raise(ErrorCode::kIoError, "malformed integer '" + s + "' in run record");
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

std::vector<ObjectiveVector> RunRecord::archive_objectives() const {
  std::vector<ObjectiveVector> out;
  for (std::size_t idx : archive) {
    for (const auto& e : log) {
      if (e.fe_index == idx) {
        out.push_back(e.f);
        break;
      }
    }
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

std::string serialize(const RunRecord& r) {
  std::ostringstream out;
  out << kMagic << '\n';
  out << "# problem=" << r.problem << '\n';
  out << "# n=" << r.n << '\n';
  out << "# m=" << r.m << '\n';
  out << "# algorithm=" << r.algorithm << '\n';
  out << "# seed=" << r.seed << '\n';
  out << "# status=" << r.status << '\n';
  out << "# diagnostic=" << one_line(r.diagnostic) << '\n';
  out << "# igd=" << (r.igd ? format_number(*r.igd) : std::string()) << '\n';
  out << "# archive=";
  for (std::size_t i = 0; i < r.archive.size(); ++i) out << (i ? " " : "") << r.archive[i];
  out << '\n';
  for (const auto& [key, value] : r.config) out << "# config." << key << '=' << one_line(value) << '\n';

  out << "iter,fe_index";
  for (std::size_t i = 1; i <= r.n; ++i) out << ",x_" << i;
  for (std::size_t j = 1; j <= r.m; ++j) out << ",f_" << j;
  out << '\n';
  for (const auto& e : r.log) {
    out << e.iteration << ',' << e.fe_index;
    for (double v : e.x) out << ',' << format_number(v);
    for (double v : e.f) out << ',' << format_number(v);
    out << '\n';
  }
  return out.str();
}

RunRecord parse_record(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) raise(ErrorCode::kIoError, "not a run record (missing header)");

  RunRecord r;
  std::map<std::string, std::string> header;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key.rfind("config.", 0) == 0) {
        r.config.emplace_back(key.substr(7), value);
      } else {
        header[key] = value;
      }
      continue;
    }
    if (!saw_columns) {
      saw_columns = true;
      r.problem = header["problem"];
      r.n = parse_size(header["n"]);
      r.m = parse_size(header["m"]);
      r.algorithm = header["algorithm"];
      r.seed = static_cast<std::uint64_t>(std::stoull(header["seed"]));
      r.status = header["status"];
      r.diagnostic = header["diagnostic"];
      if (!header["igd"].empty()) r.igd = parse_double(header["igd"]);
      for (const auto& tok : split(header["archive"], ' '))
        if (!tok.empty()) r.archive.push_back(parse_size(tok));
      if (split(line, ',').size() != 2 + r.n + r.m) raise(ErrorCode::kIoError, "run record column count mismatch");
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 2 + r.n + r.m) raise(ErrorCode::kIoError, "run record row has the wrong number of cells");
    LogEntry e;
    e.iteration = parse_size(cells[0]);
    e.fe_index = parse_size(cells[1]);
    for (std::size_t i = 0; i < r.n; ++i) e.x.push_back(parse_double(cells[2 + i]));
    for (std::size_t j = 0; j < r.m; ++j) e.f.push_back(parse_double(cells[2 + r.n + j]));
    r.log.push_back(std::move(e));
  }
  if (!saw_columns) raise(ErrorCode::kIoError, "run record has no column header");
  return r;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) raise(ErrorCode::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(ErrorCode::kIoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

void write_record(const RunRecord& record, const std::filesystem::path& path) {
  std::filesystem::path timing = path;
  timing += ".time";
  write_file_atomic(timing, format_number(record.wall_time) + "\n");
  write_file_atomic(path, serialize(record));
}

RunRecord read_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  RunRecord r = parse_record(buf.str());
  std::filesystem::path timing = path;
  timing += ".time";
  if (std::ifstream t(timing); t) t >> r.wall_time;
  return r;
}

}  // namespace saea
