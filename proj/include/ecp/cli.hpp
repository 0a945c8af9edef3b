#pragma once

// Command-line front end: simulate, sweep, verify, coeffs.
// Exit codes: 0 success, 1 verification failure, 2 usage or config error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ecp/analytics.hpp"
#include "ecp/oracle.hpp"
#include "ecp/protocol.hpp"
#include "ecp/serialization.hpp"

namespace ecp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

struct Environment {
  oracle::AnalyticModel model;
  /// Value of ECP_SEED, if set.
  std::optional<std::string> seed;

  static Environment from_process();
};

/// Everything a JSON run-config file may set. Unset fields keep defaults.
struct RunConfigFile {
  std::optional<protocol::WCoefficients> alpha;  // normalized on read
  protocol::ProtocolConfig protocol;
  std::optional<analytics::CavitySetting> cavity;
  std::optional<double> omega;
  analytics::SweepSpec sweep;
};

/// Validates the document; unknown keys and wrong types raise ConfigError
/// naming the offending field.
RunConfigFile parse_config(const Json& doc);
RunConfigFile load_config(const std::string& path);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env = Environment::from_process());

}  // namespace ecp::cli
