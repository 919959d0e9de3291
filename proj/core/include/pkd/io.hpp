#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "pkd/geometry.hpp"

namespace pkd {

// Point-file format: header line `pkd-points v1 <n> <D> <int|real>`,
// then little-endian 64-bit coordinates row-major (binary mode) or one
// comma-separated row per point (csv mode).
struct PointFileInfo {
  std::size_t n = 0;
  int dims = 0;
  bool real = false;
  bool csv = false;
};

inline PointFileInfo read_point_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("cannot read point-file header");
  std::istringstream ss(line);
  std::string magic, version, type;
  PointFileInfo info;
  ss >> magic >> version >> info.n >> info.dims >> type;
  if (magic != "pkd-points" || version != "v1" || !ss)
    throw std::runtime_error("not a pkd-points v1 file");
  if (type == "int")
    info.real = false;
  else if (type == "real")
    info.real = true;
  else
    throw std::runtime_error("unknown coordinate type: " + type);
  if (info.dims < 1) throw std::runtime_error("invalid dimension in header");
  return info;
}

inline PointFileInfo peek_point_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto info = read_point_header(in);
  // Binary and csv payloads share the header; tell them apart by the
  // exact binary payload size.
  std::streamoff header_end = in.tellg();
  in.seekg(0, std::ios::end);
  std::streamoff payload = in.tellg() - header_end;
  info.csv = payload != std::streamoff(info.n) * info.dims * 8;
  return info;
}

template <class Coord, int D>
void write_point_file(const std::string& path, std::span<const Point<Coord, D>> pts,
                      bool csv = false) {
  static_assert(sizeof(Coord) == 8, "file format stores 64-bit coordinates");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "pkd-points v1 " << pts.size() << ' ' << D << ' '
      << (std::is_integral_v<Coord> ? "int" : "real") << '\n';
  if (csv) {
    out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& p : pts) {
      for (int i = 0; i < D; ++i) out << (i ? "," : "") << p[i];
      out << '\n';
    }
  } else {
    for (const auto& p : pts)
      out.write(reinterpret_cast<const char*>(p.c.data()), sizeof(Coord) * D);
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

template <class Coord, int D>
std::vector<Point<Coord, D>> read_point_file(const std::string& path) {
  static_assert(sizeof(Coord) == 8);
  auto info = peek_point_file(path);
  if (info.dims != D) throw std::runtime_error("point file dimension mismatch");
  if (info.real != std::is_floating_point_v<Coord>)
    throw std::runtime_error("point file coordinate type mismatch");
  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  std::vector<Point<Coord, D>> pts(info.n);
  if (info.csv) {
    std::string line;
    for (std::size_t i = 0; i < info.n; ++i) {
      if (!std::getline(in, line)) throw std::runtime_error("truncated csv point file");
      std::istringstream ss(line);
      for (int d = 0; d < D; ++d) {
        char comma;
        if (d) ss >> comma;
        ss >> pts[i][d];
      }
      if (!ss) throw std::runtime_error("malformed csv row");
    }
  } else if (info.n > 0) {
    in.read(reinterpret_cast<char*>(pts.front().c.data()),
            std::streamsize(info.n) * D * 8);
    if (in.gcount() != std::streamsize(info.n) * D * 8)
      throw std::runtime_error("truncated binary point file");
  }
  return pts;
}

}  // namespace pkd
