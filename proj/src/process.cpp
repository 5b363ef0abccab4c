#include "forge/process.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "forge/error.hpp"

namespace forge {

namespace {

// Input goes through a temp file so a child that ignores stdin cannot
// deadlock us on a full pipe.
class TempInput {
 public:
  explicit TempInput(std::string_view bytes) {
    auto pattern = (std::filesystem::temp_directory_path() / "forge-in-XXXXXX").string();
    int fd = ::mkstemp(pattern.data());
    if (fd < 0) throw Error(ErrorCode::GeneratorFailure, "cannot create temp file");
    path_ = pattern;
    std::size_t off = 0;
    while (off < bytes.size()) {
      auto n = ::write(fd, bytes.data() + off, bytes.size() - off);
      if (n <= 0) {
        ::close(fd);
        throw Error(ErrorCode::GeneratorFailure, "cannot write temp file");
      }
      off += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempInput() { ::unlink(path_.c_str()); }
  TempInput(const TempInput&) = delete;
  TempInput& operator=(const TempInput&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

ProcessResult run_command(const std::string& command, std::string_view input) {
  TempInput in(input);
  // mkstemp paths contain no shell metacharacters
  const std::string full = "( " + command + " ) < '" + in.path() + "'";
  std::FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) throw Error(ErrorCode::GeneratorFailure, "cannot start: " + command);

  ProcessResult result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  int status = ::pclose(pipe);
  if (status != -1 && WIFEXITED(status)) result.exit_status = WEXITSTATUS(status);
  return result;
}

}  // namespace forge
