#pragma once

// Delimited text formats. Every file starts with a header row naming its
// columns; rows may be comma- or whitespace-separated (decided by the
// header), blank lines and lines starting with '#' are ignored.
//
//   scans      scan_id,timestamp,x,y,z,doppler[,snr]
//   estimates  timestamp,vx,vy,vz,status,inliers,total,residual_rms
//   truth      timestamp,vx,vy,vz[,wx,wy,wz]
//
// Estimate logs are written with 9 significant digits; scan and truth
// fixtures use the shortest representation that reads back bit-exact.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radvel/eval.hpp"
#include "radvel/pipeline.hpp"
#include "radvel/types.hpp"

namespace radvel::io {

/// Formats a double with 9 significant digits ("nan"/"inf" for non-finite).
std::string format_number(double x);
/// Shortest decimal form that parses back to the same double.
std::string format_exact(double x);

/// Incremental scan reader. A scan is complete when a row with a different
/// scan_id arrives, on a blank line, or at end of input, so it can sit on a
/// pipe and hand out scans as they finish.
class ScanReader {
 public:
  explicit ScanReader(std::istream& in, DopplerSign sign = DopplerSign::AsIs);

  /// Next complete scan, or nullopt at end of input. Throws Errc::ParseError,
  /// Errc::MissingColumn and Errc::NonMonotonicScanId with the line number.
  std::optional<RadarScan> next();

  /// scan_id of the scan most recently returned by next().
  std::int64_t last_scan_id() const noexcept { return last_id_; }

 private:
  struct Columns {
    int scan_id = -1, timestamp = -1, x = -1, y = -1, z = -1, doppler = -1, snr = -1;
    std::size_t count = 0;
  };

  bool read_header();
  std::optional<RadarScan> take_pending();

  std::istream& in_;
  DopplerSign sign_;
  Columns cols_;
  bool header_read_ = false;
  bool comma_ = true;
  std::size_t line_no_ = 0;
  std::optional<RadarScan> pending_;
  std::int64_t pending_id_ = 0;
  std::int64_t last_id_ = -1;
  bool have_last_id_ = false;
};

std::vector<RadarScan> parse_scan_file(std::istream& in, DopplerSign sign = DopplerSign::AsIs);
/// Throws Errc::IoError when the file cannot be opened.
std::vector<RadarScan> parse_scan_file(const std::string& path, DopplerSign sign = DopplerSign::AsIs);

/// Scan ids are the positions in `scans`.
void write_scan_file(std::ostream& out, std::span<const RadarScan> scans);

void write_estimate_header(std::ostream& out);
void write_estimate_row(std::ostream& out, const VelocityEstimate& e);
std::vector<VelocityEstimate> parse_estimate_log(std::istream& in);

struct GroundTruthFile {
  std::vector<metrics::GroundTruthSample> samples;
  bool has_angular_velocity = false;
};

GroundTruthFile parse_gt_file(std::istream& in);
void write_gt_file(std::ostream& out, std::span<const metrics::GroundTruthSample> samples);

}  // namespace radvel::io
