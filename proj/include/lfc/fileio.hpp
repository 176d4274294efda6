#pragma once
// Atomic file writes: write a temp sibling, then rename over the target so
// readers never observe a partially written file.

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace lfc {

inline void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace lfc
