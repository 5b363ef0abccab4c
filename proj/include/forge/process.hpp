#pragma once

#include <string>
#include <string_view>

namespace forge {

struct ProcessResult {
  int exit_status = -1;  // -1 when the process did not exit normally
  std::string output;
};

/// Runs `command` through /bin/sh with `input` on stdin and captures stdout.
/// Throws Error{GeneratorFailure} when the process cannot be started.
ProcessResult run_command(const std::string& command, std::string_view input);

}  // namespace forge
