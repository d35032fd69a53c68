#pragma once

namespace tspe {

// Parses argv and dispatches to the pipeline. Exit codes: 0 success,
// 2 command-line usage problems, 1 any pipeline error (the message names the
// error category).
int run_cli(int argc, const char* const* argv);

}  // namespace tspe
