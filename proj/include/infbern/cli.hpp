// Command-line front end. Exit codes: 0 when every verification passes,
// 2 when one fails, 1 on usage or input errors.
#ifndef INFBERN_CLI_HPP
#define INFBERN_CLI_HPP

#include <iosfwd>

namespace infbern {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace infbern

#endif  // INFBERN_CLI_HPP
