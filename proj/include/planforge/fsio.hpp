#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "planforge/error.hpp"

namespace planforge {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot open file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("cannot write file " + path.string());
  out << content;
  if (!out)
    throw ValidationError("failed while writing file " + path.string());
}

}  // namespace planforge
