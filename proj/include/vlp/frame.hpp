#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "vlp/error.hpp"

namespace vlp {

/// Row-major 8-bit grayscale image.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  double timestamp = 0.0;
  long frame_index = 0;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int u, int v) const {
    return pixels[static_cast<std::size_t>(v) * width + u];
  }
  std::uint8_t& at(int u, int v) { return pixels[static_cast<std::size_t>(v) * width + u]; }

  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }
};

inline void write_pgm(const std::filesystem::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

namespace detail {

inline std::string next_pgm_token(std::istream& in) {
  std::string token;
  while (in) {
    int c = in.peek();
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  in >> token;
  return token;
}

}  // namespace detail

inline Frame read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const auto bad = [&](const std::string& why) {
    return Error(ErrorKind::Io, path.string() + ": " + why);
  };
  if (detail::next_pgm_token(in) != "P5") throw bad("not a binary PGM (P5)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(detail::next_pgm_token(in));
    h = std::stoi(detail::next_pgm_token(in));
    maxval = std::stoi(detail::next_pgm_token(in));
  } catch (const std::exception&) {
    throw bad("malformed header");
  }
  if (w <= 0 || h <= 0 || maxval != 255) throw bad("unsupported dimensions or maxval");
  in.get();  // single whitespace before the raster
  Frame frame(w, h);
  in.read(reinterpret_cast<char*>(frame.pixels.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size())) {
    throw bad("truncated raster");
  }
  return frame;
}

inline std::string frame_file_name(long index) {
  std::ostringstream name;
  name << "frame_";
  name.width(6);
  name.fill('0');
  name << index << ".pgm";
  return name.str();
}

}  // namespace vlp
