#include "infbern/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace infbern {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_field(std::ostream& os, const Grid& g, const Eigen::ArrayXXd& values) {
  os << "FIELD v1\n";
  os << g.nx << ' ' << g.ny << ' ' << fmt17(g.origin.x()) << ' ' << fmt17(g.origin.y()) << ' '
     << fmt17(g.h) << '\n';
  for (Index j = 0; j < g.ny; ++j) {
    for (Index i = 0; i < g.nx; ++i) {
      if (i) os << ' ';
      os << fmt17(values(i, j));
    }
    os << '\n';
  }
}

void write_field(std::ostream& os, const ScalarField& f) { write_field(os, f.grid, f.values); }

void write_mask(std::ostream& os, const CompactMask& m) {
  write_field(os, m.grid, m.member.cast<double>());
}

RawField read_raw_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FieldFormatError(FieldFormatError::Kind::parse, "empty field file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "FIELD v1")
    throw FieldFormatError(FieldFormatError::Kind::version,
                           "unsupported field header '" + line + "' (expected 'FIELD v1')");
  if (!std::getline(is, line))
    throw FieldFormatError(FieldFormatError::Kind::shape, "missing grid line");
  std::istringstream hdr(line);
  RawField f;
  double x0, y0;
  if (!(hdr >> f.grid.nx >> f.grid.ny >> x0 >> y0 >> f.grid.h) || f.grid.nx <= 0 ||
      f.grid.ny <= 0 || !(f.grid.h > 0))
    throw FieldFormatError(FieldFormatError::Kind::parse, "malformed grid line '" + line + "'");
  f.grid.origin = Point(x0, y0);
  f.values.resize(f.grid.nx, f.grid.ny);
  for (Index j = 0; j < f.grid.ny; ++j) {
    if (!std::getline(is, line))
      throw FieldFormatError(FieldFormatError::Kind::shape,
                             "expected " + std::to_string(f.grid.ny) + " rows, found " +
                                 std::to_string(j));
    std::istringstream row(line);
    Index i = 0;
    std::string tok;
    while (row >> tok) {
      if (i >= f.grid.nx)
        throw FieldFormatError(FieldFormatError::Kind::shape,
                               "row " + std::to_string(j) + " has more than nx values");
      try {
        std::size_t used = 0;
        f.values(i, j) = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FieldFormatError(FieldFormatError::Kind::parse, "bad value '" + tok + "'");
      }
      ++i;
    }
    if (i != f.grid.nx)
      throw FieldFormatError(FieldFormatError::Kind::shape,
                             "row " + std::to_string(j) + " has " + std::to_string(i) +
                                 " values, expected " + std::to_string(f.grid.nx));
  }
  return f;
}

ScalarField read_field(std::istream& is) {
  RawField raw = read_raw_field(is);
  ScalarField f(raw.grid, Mask::Constant(raw.grid.nx, raw.grid.ny, true));
  f.values = std::move(raw.values);
  return f;
}

CompactMask read_mask(std::istream& is) {
  RawField raw = read_raw_field(is);
  return CompactMask(raw.grid, raw.values != 0.0);
}

namespace {

template <class F>
void with_output(const std::string& path, F&& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  f(os);
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read '" + path + "'");
  return is;
}

}  // namespace

void save_field(const std::string& path, const ScalarField& f) {
  with_output(path, [&](std::ostream& os) { write_field(os, f); });
}

void save_mask(const std::string& path, const CompactMask& m) {
  with_output(path, [&](std::ostream& os) { write_mask(os, m); });
}

ScalarField load_field(const std::string& path) {
  auto is = open_input(path);
  return read_field(is);
}

CompactMask load_mask(const std::string& path) {
  auto is = open_input(path);
  return read_mask(is);
}

}  // namespace infbern
