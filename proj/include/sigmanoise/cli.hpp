#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigmanoise::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kNumeric = 3;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A validated command line. `options` holds every flag of the subcommand as
/// text (defaults included), so the descriptor alone determines the output.
struct ExperimentDescriptor {
    std::string subcommand;
    std::map<std::string, std::string> options;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::string output;
    std::string format = "csv";

    /// Canonical JSON text embedded in every output file.
    std::string to_json() const;
};

std::vector<std::string> subcommands();

/// Throws UsageError naming the failing flag.
ExperimentDescriptor parse(const std::vector<std::string>& arguments);

/// Runs the experiment and writes the artifact to `out`, or to the output
/// file when one is given (relative paths resolve against
/// $SIGMANOISE_OUTPUT_DIR). Errors go to `err` as one JSON record.
int execute(const ExperimentDescriptor& descriptor, std::ostream& out, std::ostream& err);

/// parse + execute; arguments exclude the program name.
int run(const std::vector<std::string>& arguments, std::ostream& out, std::ostream& err);

}  // namespace sigmanoise::cli
