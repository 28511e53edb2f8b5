#pragma once

namespace vlaw::cli {

// Exit codes: 0 success, 2 configuration errors (unknown key, type mismatch,
// snapshot mismatch, bad flags), 3 missing artifacts, 1 anything else.
int cli_main(int argc, const char* const* argv);

}  // namespace vlaw::cli
