// FIELD v1 text format:
//   line 1  "FIELD v1"
//   line 2  "nx ny x0 y0 h"
//   then ny rows of nx space-separated values, row-major from y-min.
// Masks use 0/1. Values are written with 17 significant digits.
#ifndef INFBERN_FIELD_IO_HPP
#define INFBERN_FIELD_IO_HPP

#include "infbern/grid.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace infbern {

class FieldFormatError : public std::runtime_error {
 public:
  enum class Kind { version, shape, parse };
  FieldFormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

void write_field(std::ostream& os, const Grid& grid, const Eigen::ArrayXXd& values);
void write_field(std::ostream& os, const ScalarField& f);
void write_mask(std::ostream& os, const CompactMask& m);

struct RawField {
  Grid grid;
  Eigen::ArrayXXd values;
};

RawField read_raw_field(std::istream& is);

/// Reads a field; every node is flagged inside (the format carries no mask).
ScalarField read_field(std::istream& is);
CompactMask read_mask(std::istream& is);

void save_field(const std::string& path, const ScalarField& f);
void save_mask(const std::string& path, const CompactMask& m);
ScalarField load_field(const std::string& path);
CompactMask load_mask(const std::string& path);

}  // namespace infbern

#endif  // INFBERN_FIELD_IO_HPP
