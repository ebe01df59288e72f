#pragma once

#include <iosfwd>

namespace strongcomp::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;

/// strongcomp solve|sweep|analyze|verify|eig --config <path> --out <dir> [--set key=value ...]
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace strongcomp::cli
