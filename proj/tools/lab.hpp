#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace olb::lab {

inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;

struct Config {
  std::string command;
  std::string family;
  std::size_t n = 2;
  double p = 2.0;
  std::string eps;
  std::optional<std::size_t> M;
  std::string algo;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  double pe = 0.0;
  std::string out;
  std::string format = "csv";
  unsigned jobs = 1;
  std::vector<std::size_t> ns{1, 2, 4, 8};
  std::vector<std::string> epss{"2^-6", "2^-9", "2^-12"};
  std::optional<std::size_t> budget;
  std::size_t steps = 8;
  std::string events;
  bool p_given = false;
  bool n_given = false;
  bool epss_given = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses "a/b", "2^e", "m*2^e" and decimals to binary64.
double parse_real(const std::string& text);

/// Runs one subcommand. The report goes to cfg.out when set, otherwise to
/// `out`; diagnostics go to `err`. Returns the process exit code.
int run(const Config& cfg, std::ostream& out, std::ostream& err);

/// Full command line entry point (argv[0] excluded).
int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace olb::lab
