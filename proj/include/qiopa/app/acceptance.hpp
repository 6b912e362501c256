#ifndef QIOPA_APP_ACCEPTANCE_HPP
#define QIOPA_APP_ACCEPTANCE_HPP

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace qiopa::app {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Measured values against their pinned tolerances, plus diagnostics.
  std::string summary;
};

/// The eleven acceptance checks in order. Check 11 writes scan artifacts below
/// `scratch` and reads them back.
std::vector<std::function<CheckResult()>> acceptance_checks(const std::filesystem::path& scratch);

/// "PASS  3 name: summary"
std::string format_check(const CheckResult& r);

}  // namespace qiopa::app

#endif  // QIOPA_APP_ACCEPTANCE_HPP
