#pragma once
// Grid exports and per-episode scan logs.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hdogm/detail/format.hpp"
#include "hdogm/errors.hpp"
#include "hdogm/geometry.hpp"
#include "hdogm/scan_pipeline.hpp"

namespace hdogm {

enum class GridFormat { Csv, Pgm };

/// CSV: header `rows,cols,resolution`, one line with those values, then one
/// line per row. PGM: binary P5, affine map of [min, max] onto 0..255, image
/// top row = highest grid row.
inline void export_grid(const OccupancyGrid& grid, const std::string& path, GridFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path, "cannot open for writing");
  if (format == GridFormat::Csv) {
    os << "rows,cols,resolution\n" << grid.rows() << ',' << grid.cols() << ',' << detail::format_exact(grid.resolution())
       << '\n';
    for (std::size_t r = 0; r < grid.rows(); ++r)
      for (std::size_t c = 0; c < grid.cols(); ++c)
        os << detail::format_exact(grid.at(r, c)) << (c + 1 == grid.cols() ? '\n' : ',');
  } else {
    const auto [lo, hi] = std::minmax_element(grid.values().begin(), grid.values().end());
    const double span = *hi - *lo;
    os << "P5\n" << grid.cols() << ' ' << grid.rows() << "\n255\n";
    for (std::size_t r = grid.rows(); r-- > 0;)
      for (std::size_t c = 0; c < grid.cols(); ++c) {
        const double t = span > 0 ? (grid.at(r, c) - *lo) / span : 0.0;
        os.put(static_cast<char>(static_cast<std::uint8_t>(std::lround(255.0 * t))));
      }
  }
  if (!os) throw IoError(path, "write failed");
}

/// Reads the CSV form back. The origin is not stored and comes back as (0, 0).
inline OccupancyGrid read_grid_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(is, line) || line != "rows,cols,resolution") throw IoError(path, "missing grid CSV header");
  std::size_t rows = 0, cols = 0;
  double res = 0;
  char c1 = 0, c2 = 0;
  if (!std::getline(is, line)) throw IoError(path, "missing grid shape");
  std::istringstream shape(line);
  if (!(shape >> rows >> c1 >> cols >> c2 >> res) || c1 != ',' || c2 != ',') throw IoError(path, "bad grid shape line");
  OccupancyGrid g(rows, cols, res, {0.0, 0.0});
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(is, line)) throw IoError(path, "truncated grid");
    std::istringstream row(line);
    std::string cell;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::getline(row, cell, ',')) throw IoError(path, "short grid row " + std::to_string(r));
      try {
        g.at(r, c) = std::stod(cell);
      } catch (const std::exception&) {
        throw IoError(path, "bad grid value '" + cell + "'");
      }
    }
  }
  return g;
}

/// Scan log rows: `t,beam,range,pose_x,pose_y,heading`.
class ScanLogWriter {
 public:
  explicit ScanLogWriter(std::ostream& os) : os_(os) { os_ << "t,beam,range,pose_x,pose_y,heading\n"; }

  void write(std::size_t t, const PolarScan& scan, const Pose2D& pose) {
    const std::string tail =
        detail::format_exact(pose.x) + ',' + detail::format_exact(pose.y) + ',' + detail::format_exact(pose.heading);
    for (std::size_t i = 0; i < scan.ranges.size(); ++i)
      os_ << t << ',' << i << ',' << detail::format_exact(scan.ranges[i]) << ',' << tail << '\n';
  }

 private:
  std::ostream& os_;
};

struct LoggedScan {
  std::size_t t = 0;
  Pose2D pose;
  std::vector<double> ranges;
};

inline std::vector<LoggedScan> read_scan_log(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(is, line) || line != "t,beam,range,pose_x,pose_y,heading")
    throw IoError(path, "missing scan log header");
  std::vector<LoggedScan> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t t = 0, beam = 0;
    double range = 0, x = 0, y = 0, h = 0;
    char c[5] = {};
    if (!(row >> t >> c[0] >> beam >> c[1] >> range >> c[2] >> x >> c[3] >> y >> c[4] >> h) ||
        std::any_of(std::begin(c), std::end(c), [](char ch) { return ch != ','; }))
      throw IoError(path, "malformed row at line " + std::to_string(lineno));
    if (out.empty() || out.back().t != t) {
      if (!out.empty() && t < out.back().t) throw IoError(path, "time goes backwards at line " + std::to_string(lineno));
      out.push_back({t, Pose2D(x, y, h), {}});
    }
    if (beam != out.back().ranges.size()) throw IoError(path, "beam out of order at line " + std::to_string(lineno));
    out.back().ranges.push_back(range);
  }
  return out;
}

}  // namespace hdogm
