#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maketex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitGenerator = 2;

// args excludes the program name. Reports on `out`; failures go to `err`
// as a single "error: ..." line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maketex::cli
