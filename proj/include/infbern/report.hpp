// Pass/fail records for checked properties, and their JSON form.
#ifndef INFBERN_REPORT_HPP
#define INFBERN_REPORT_HPP

#include "infbern/grid.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace infbern {

struct VerificationReport {
  std::string property;
  bool pass = false;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::optional<Point> location;
  std::string citation;  // the mathematical statement being checked
  std::string note;

  /// pass is set to worst_violation <= tolerance.
  static VerificationReport make(std::string property, double worst_violation, double tolerance,
                                 std::optional<Point> location, std::string citation,
                                 std::string note = {});
};

nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const std::vector<VerificationReport>& reports);

bool all_pass(const std::vector<VerificationReport>& reports);

/// JSON number, or the strings "inf" / "-inf" / "nan" for non-finite values.
nlohmann::json number(double x);

}  // namespace infbern

#endif  // INFBERN_REPORT_HPP
