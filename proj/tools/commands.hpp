#pragma once

namespace vrface::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

int run(int argc, char** argv);

}  // namespace vrface::cli
