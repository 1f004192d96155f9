#pragma once

namespace satrag::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitProvider = 2;
inline constexpr int kExitValidation = 3;

int run(int argc, char** argv);

}  // namespace satrag::cli
