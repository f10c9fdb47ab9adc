#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nhs::cli {

// Environment variable naming the root that relative output directories live under.
inline constexpr const char* kOutputRootEnv = "NHS_OUTPUT_ROOT";

// Exit codes: 0 all requested checks passed, 1 a check or module step failed,
// 2 bad input (usage, malformed JSON, contract violation).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

// write-temp-then-rename
void write_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace nhs::cli
