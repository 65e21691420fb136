// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "edumetrics/error.hpp"

namespace edumetrics::io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open input file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Reads a file, transparently inflating gzip content (detected by magic bytes).
inline std::string read_maybe_gzip(const std::filesystem::path& path) {
  std::string head;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open input file '" + path.string() + "'");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    head.assign(magic, static_cast<std::size_t>(in.gcount()));
  }
  if (head.size() < 2 || static_cast<unsigned char>(head[0]) != 0x1f ||
      static_cast<unsigned char>(head[1]) != 0x8b)
    return read_file(path);
  gzFile gz = gzopen(path.string().c_str(), "rb");
  if (!gz) throw ConfigError("cannot open gzip file '" + path.string() + "'");
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(gz, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  int err = 0;
  const char* msg = gzerror(gz, &err);
  std::string message = msg ? msg : "";
  gzclose(gz);
  if (n < 0 || (err != Z_OK && err != Z_STREAM_END))
    throw FormatError("corrupt gzip file '" + path.string() + "': " + message);
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("failed writing output file '" + path.string() + "'");
}

inline void write_gzip(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  gzFile gz = gzopen(path.string().c_str(), "wb");
  if (!gz) throw ConfigError("cannot write output file '" + path.string() + "'");
  if (!content.empty() && gzwrite(gz, content.data(), static_cast<unsigned>(content.size())) == 0) {
    gzclose(gz);
    throw ConfigError("failed writing gzip file '" + path.string() + "'");
  }
  gzclose(gz);
}

}  // namespace edumetrics::io
