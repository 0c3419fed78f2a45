#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace upsr::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitFailure = 3 };

/// Bad flags or flag combinations; exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Environment variable consulted when --seed is absent.
inline constexpr const char* kSeedEnv = "UPSR_SEED";
inline constexpr std::uint64_t kDefaultSeed = 1;

/// Comma-separated reals; the empty string is the empty list. Throws UsageError.
std::vector<double> parse_list(const std::string& text, const std::string& flag);
/// Comma-separated positive integers. Throws UsageError.
std::vector<std::size_t> parse_counts(const std::string& text, const std::string& flag);
/// --seed if given, else $UPSR_SEED, else kDefaultSeed. Throws UsageError on a bad env value.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

/// Entry point. argv[0] is the program name. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace upsr::cli
