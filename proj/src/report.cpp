#include "infbern/report.hpp"

#include <algorithm>
#include <cmath>

namespace infbern {

VerificationReport VerificationReport::make(std::string property, double worst_violation,
                                            double tolerance, std::optional<Point> location,
                                            std::string citation, std::string note) {
  VerificationReport r;
  r.property = std::move(property);
  r.worst_violation = worst_violation;
  r.tolerance = tolerance;
  r.pass = worst_violation <= tolerance;
  r.location = std::move(location);
  r.citation = std::move(citation);
  r.note = std::move(note);
  return r;
}

nlohmann::json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["property"] = r.property;
  j["pass"] = r.pass;
  j["worst_violation"] = number(r.worst_violation);
  j["tolerance"] = number(r.tolerance);
  j["location"] = r.location ? nlohmann::json::array({r.location->x(), r.location->y()})
                             : nlohmann::json(nullptr);
  j["citation"] = r.citation;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::json to_json(const std::vector<VerificationReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

bool all_pass(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

}  // namespace infbern
