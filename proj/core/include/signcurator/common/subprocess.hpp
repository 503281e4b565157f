#pragma once

#include <string>

namespace signcurator {

struct CommandResult {
  int exit_code = -1;
  std::string stderr_text;
};

// Runs `command` through /bin/sh with stderr captured to a temp file and
// stdout discarded. Throws IoError only when the shell itself cannot be
// spawned.
CommandResult run_shell_command(const std::string& command);

}  // namespace signcurator
