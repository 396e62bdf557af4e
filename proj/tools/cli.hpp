#pragma once

#include <string>
#include <vector>

namespace simrel {

struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// Runs the command line (without argv[0]) and captures the output streams.
/// Exit codes: 0 related / success, 1 not related, 2 usage or input error.
CliResult run_cli(const std::vector<std::string>& args);

int cli_main(int argc, char** argv);

} // namespace simrel
