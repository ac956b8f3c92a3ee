#ifndef FDW_FORMAT_HPP
#define FDW_FORMAT_HPP

#include <string>

namespace fdw {

/// Shortest round-trip decimal form of a double; byte-stable across runs.
std::string format_double(double value);

}  // namespace fdw

#endif  // FDW_FORMAT_HPP
