// Negative control: verify against a deliberately wrong closed form.
// Registered with WILL_FAIL, so ctest passes only if verify exits nonzero.
#include <iostream>

#include "ecp/cli.hpp"

int main() {
  ecp::cli::Environment env;
  env.model.p2_round = [](int k, const ecp::protocol::WCoefficients& c) {
    return k == 2 ? 1.01 * ecp::analytics::p2_round(k, c) : ecp::analytics::p2_round(k, c);
  };
  const int code = ecp::cli::run({"verify", "--grid", "5", "--depth", "3,3"}, std::cout, std::cerr, env);
  std::cout << "verify exit code " << code << '\n';
  return code;
}
