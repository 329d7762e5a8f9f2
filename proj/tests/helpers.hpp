#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testutil {

// Fresh scratch directory per test, wiped on entry so reruns are clean.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "foodmap_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Relative path -> bytes for every regular file under root.
inline std::map<std::string, std::string> slurp_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
    if (entry.is_regular_file())
      out[std::filesystem::relative(entry.path(), root).string()] = read_file(entry.path());
  return out;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the real CLI binary with the given arguments, capturing both streams.
inline CliResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
  const auto out_path = scratch / "cli_stdout.txt";
  const auto err_path = scratch / "cli_stderr.txt";
  const std::string command = std::string(FOODMAP_CLI_PATH) + " " + args + " >" +
                              out_path.string() + " 2>" + err_path.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = (status >= 0 && (status & 0x7f) == 0) ? ((status >> 8) & 0xff) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(err_path);
  return result;
}

}  // namespace testutil
