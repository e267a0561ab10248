#pragma once

namespace lyrictk {

// Parses arguments and dispatches to one subcommand (transcribe,
// build-dataset, evaluate, ablate, gt-experiment). Returns the process
// exit code: 0 success, 1 runtime failure, 2 usage or configuration error.
// The chat credential is read from LYRICTK_CHAT_API_KEY only; there is no
// flag for it and its value is never echoed anywhere.
int run_cli(int argc, const char* const* argv);

}  // namespace lyrictk
