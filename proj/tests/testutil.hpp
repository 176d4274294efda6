#pragma once
// Shared test plumbing: scratch directories, file helpers, and a runner for
// the command-line tool under test.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace lfc::test {

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("lfc-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

struct CliResult {
  int code = -1;
  std::string output;  // stdout + stderr
};

#ifdef LFCBENCH_CLI_PATH
inline CliResult run_cli(const std::string& args, const TempDir& dir, const std::string& tag) {
  const std::string out_file = dir.str("cli-" + tag + ".txt");
  const std::string cmd =
      std::string(LFCBENCH_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.output = read_file(out_file);
  return r;
}
#endif

}  // namespace lfc::test
