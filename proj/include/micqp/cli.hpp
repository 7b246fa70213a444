#pragma once

// Subcommand dispatch behind the micqp command line tool.

#include <string>
#include <vector>

#include "micqp/io.hpp"

namespace micqp {

struct CommandOutput {
  int exit_code = 0;  ///< 0 answered, 1 internal failure, 2 input error
  Json result;        ///< printed on stdout when exit_code == 0
  std::string error;  ///< printed on stderr otherwise
};

const std::vector<std::string>& command_names();

/// Runs one subcommand on the text of its input file.
CommandOutput run_command(const std::string& command, const std::string& input, bool trace);

}  // namespace micqp
