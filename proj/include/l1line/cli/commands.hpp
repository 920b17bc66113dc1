#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "l1line/types.hpp"

namespace l1line::cli {

enum ExitCode : int {
  kOk = 0,
  kCertificationFailed = 1,
  kIoError = 2,
  kParseError = 3,
  kValidationError = 4,
};

struct CertifyReport {
  std::size_t subproblems{0};
  std::size_t failures{0};
  double max_gap{0};
  double max_infeasibility{0};
  std::vector<std::string> messages;  // one per failure

  bool ok() const { return failures == 0; }
};

/// Builds and checks a dual certificate for every (preserved, target)
/// subproblem at each penalty. `corrupt` perturbs the first certificate
/// before checking, as a negative control.
CertifyReport certify(const DataMatrix<double>& data, std::span<const double> lambdas, double tol,
                      bool corrupt = false);

/// Entry point of the l1line tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace l1line::cli
