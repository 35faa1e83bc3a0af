#include "radvel/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>

namespace radvel::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::vector<std::string_view> split(std::string_view line, bool comma) {
  std::vector<std::string_view> out;
  if (comma) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      if (i > start) out.push_back(line.substr(start, i - start));
    }
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

double to_double(std::string_view field, std::size_t line_no, std::string_view column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    parse_fail(line_no, "bad number '" + std::string(field) + "' in column " + std::string(column));
  }
  return value;
}

std::int64_t to_int(std::string_view field, std::size_t line_no, std::string_view column) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    parse_fail(line_no, "bad integer '" + std::string(field) + "' in column " + std::string(column));
  }
  return value;
}

// Header handling shared by all formats.
struct Header {
  std::unordered_map<std::string, int> index;
  bool comma = true;
  std::size_t count = 0;

  int find(const std::string& name) const {
    const auto it = index.find(name);
    return it == index.end() ? -1 : it->second;
  }
  int require(const std::string& name) const {
    const int i = find(name);
    if (i < 0) throw Error(Errc::MissingColumn, name);
    return i;
  }
};

Header parse_header(std::string_view line) {
  Header h;
  h.comma = line.find(',') != std::string_view::npos;
  const auto fields = split(line, h.comma);
  h.count = fields.size();
  for (std::size_t i = 0; i < fields.size(); ++i) h.index.emplace(std::string(fields[i]), static_cast<int>(i));
  return h;
}

// Reads the header line; returns false on empty input.
bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!skippable(line)) return true;
  }
  return false;
}

std::vector<std::string_view> row_fields(std::string_view line, const Header& h, std::size_t line_no) {
  auto fields = split(line, h.comma);
  if (fields.size() != h.count) {
    parse_fail(line_no, "expected " + std::to_string(h.count) + " fields, found " +
                            std::to_string(fields.size()));
  }
  return fields;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_exact(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

ScanReader::ScanReader(std::istream& in, DopplerSign sign) : in_(in), sign_(sign) {}

bool ScanReader::read_header() {
  std::string line;
  if (!next_content_line(in_, line, line_no_)) return false;
  const Header h = parse_header(line);
  comma_ = h.comma;
  cols_.count = h.count;
  cols_.scan_id = h.require("scan_id");
  cols_.timestamp = h.require("timestamp");
  cols_.x = h.require("x");
  cols_.y = h.require("y");
  cols_.z = h.require("z");
  cols_.doppler = h.require("doppler");
  cols_.snr = h.find("snr");
  header_read_ = true;
  return true;
}

std::optional<RadarScan> ScanReader::take_pending() {
  std::optional<RadarScan> out;
  out.swap(pending_);
  if (out) {
    last_id_ = pending_id_;
    have_last_id_ = true;
  }
  return out;
}

std::optional<RadarScan> ScanReader::next() {
  if (!header_read_ && !read_header()) return std::nullopt;

  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    const auto content = trim(line);
    if (content.empty()) {
      if (pending_) return take_pending();
      continue;
    }
    if (content.front() == '#') continue;

    Header h;
    h.comma = comma_;
    h.count = cols_.count;
    const auto f = row_fields(line, h, line_no_);
    const std::int64_t id = to_int(f[static_cast<std::size_t>(cols_.scan_id)], line_no_, "scan_id");
    const double t = to_double(f[static_cast<std::size_t>(cols_.timestamp)], line_no_, "timestamp");
    Detection d;
    d.position = Vec3(to_double(f[static_cast<std::size_t>(cols_.x)], line_no_, "x"),
                      to_double(f[static_cast<std::size_t>(cols_.y)], line_no_, "y"),
                      to_double(f[static_cast<std::size_t>(cols_.z)], line_no_, "z"));
    d.doppler = to_double(f[static_cast<std::size_t>(cols_.doppler)], line_no_, "doppler");
    if (sign_ == DopplerSign::Flipped) d.doppler = -d.doppler;
    if (cols_.snr >= 0) {
      const auto field = f[static_cast<std::size_t>(cols_.snr)];
      d.snr = field.empty() ? 1.0 : to_double(field, line_no_, "snr");
    }

    const std::int64_t previous = pending_ ? pending_id_ : last_id_;
    const bool have_previous = pending_.has_value() || have_last_id_;
    if (have_previous && id < previous) {
      throw Error(Errc::NonMonotonicScanId, "line " + std::to_string(line_no_) + ": scan_id " +
                                                std::to_string(id) + " after " + std::to_string(previous));
    }
    if (!pending_ && have_last_id_ && id == last_id_) {
      throw Error(Errc::NonMonotonicScanId,
                  "line " + std::to_string(line_no_) + ": scan_id " + std::to_string(id) + " reopened");
    }

    if (pending_ && id != pending_id_) {
      auto done = take_pending();
      pending_ = RadarScan{t, {d}};
      pending_id_ = id;
      return done;
    }
    if (pending_) {
      if (t != pending_->timestamp) {
        parse_fail(line_no_, "timestamp differs within scan_id " + std::to_string(id));
      }
      pending_->detections.push_back(d);
    } else {
      pending_ = RadarScan{t, {d}};
      pending_id_ = id;
    }
  }
  if (in_.bad()) throw Error(Errc::IoError, "read failure near line " + std::to_string(line_no_));
  return take_pending();
}

std::vector<RadarScan> parse_scan_file(std::istream& in, DopplerSign sign) {
  ScanReader reader(in, sign);
  std::vector<RadarScan> scans;
  while (auto scan = reader.next()) scans.push_back(std::move(*scan));
  return scans;
}

std::vector<RadarScan> parse_scan_file(const std::string& path, DopplerSign sign) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  return parse_scan_file(in, sign);
}

void write_scan_file(std::ostream& out, std::span<const RadarScan> scans) {
  out << "scan_id,timestamp,x,y,z,doppler,snr\n";
  for (std::size_t k = 0; k < scans.size(); ++k) {
    const std::string t = format_exact(scans[k].timestamp);
    for (const auto& d : scans[k].detections) {
      out << k << ',' << t << ',' << format_exact(d.position.x()) << ','
          << format_exact(d.position.y()) << ',' << format_exact(d.position.z()) << ','
          << format_exact(d.doppler) << ',' << format_exact(d.snr) << '\n';
    }
  }
}

void write_estimate_header(std::ostream& out) {
  out << "timestamp,vx,vy,vz,status,inliers,total,residual_rms\n";
}

void write_estimate_row(std::ostream& out, const VelocityEstimate& e) {
  out << format_number(e.timestamp) << ',' << format_number(e.velocity.x()) << ','
      << format_number(e.velocity.y()) << ',' << format_number(e.velocity.z()) << ','
      << to_string(e.status) << ',' << e.inlier_count << ',' << e.total_count << ','
      << format_number(e.residual_rms) << '\n';
}

std::vector<VelocityEstimate> parse_estimate_log(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<VelocityEstimate> out;
  if (!next_content_line(in, line, line_no)) return out;
  const Header h = parse_header(line);
  const auto col = [&](const char* name) { return static_cast<std::size_t>(h.require(name)); };
  const std::size_t ct = col("timestamp"), cx = col("vx"), cy = col("vy"), cz = col("vz"),
                    cs = col("status"), ci = col("inliers"), cn = col("total"),
                    cr = col("residual_rms");
  while (next_content_line(in, line, line_no)) {
    const auto f = row_fields(line, h, line_no);
    VelocityEstimate e;
    e.timestamp = to_double(f[ct], line_no, "timestamp");
    e.velocity = Vec3(to_double(f[cx], line_no, "vx"), to_double(f[cy], line_no, "vy"),
                      to_double(f[cz], line_no, "vz"));
    try {
      e.status = parse_status(f[cs]);
    } catch (const Error&) {
      parse_fail(line_no, "unknown status '" + std::string(f[cs]) + "'");
    }
    e.inlier_count = static_cast<int>(to_int(f[ci], line_no, "inliers"));
    e.total_count = static_cast<int>(to_int(f[cn], line_no, "total"));
    e.residual_rms = to_double(f[cr], line_no, "residual_rms");
    out.push_back(e);
  }
  return out;
}

GroundTruthFile parse_gt_file(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  GroundTruthFile out;
  if (!next_content_line(in, line, line_no)) return out;
  const Header h = parse_header(line);
  const auto col = [&](const char* name) { return static_cast<std::size_t>(h.require(name)); };
  const std::size_t ct = col("timestamp"), cx = col("vx"), cy = col("vy"), cz = col("vz");
  const int wx = h.find("wx"), wy = h.find("wy"), wz = h.find("wz");
  out.has_angular_velocity = wx >= 0 && wy >= 0 && wz >= 0;
  while (next_content_line(in, line, line_no)) {
    const auto f = row_fields(line, h, line_no);
    metrics::GroundTruthSample s;
    s.timestamp = to_double(f[ct], line_no, "timestamp");
    s.velocity = Vec3(to_double(f[cx], line_no, "vx"), to_double(f[cy], line_no, "vy"),
                      to_double(f[cz], line_no, "vz"));
    if (out.has_angular_velocity) {
      s.angular_velocity = Vec3(to_double(f[static_cast<std::size_t>(wx)], line_no, "wx"),
                                to_double(f[static_cast<std::size_t>(wy)], line_no, "wy"),
                                to_double(f[static_cast<std::size_t>(wz)], line_no, "wz"));
    }
    out.samples.push_back(s);
  }
  return out;
}

void write_gt_file(std::ostream& out, std::span<const metrics::GroundTruthSample> samples) {
  out << "timestamp,vx,vy,vz,wx,wy,wz\n";
  for (const auto& s : samples) {
    out << format_exact(s.timestamp) << ',' << format_exact(s.velocity.x()) << ','
        << format_exact(s.velocity.y()) << ',' << format_exact(s.velocity.z()) << ','
        << format_exact(s.angular_velocity.x()) << ',' << format_exact(s.angular_velocity.y())
        << ',' << format_exact(s.angular_velocity.z()) << '\n';
  }
}

}  // namespace radvel::io
