#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace corrdyn {

/// Library-wide exception type. Every message is a single line so the CLI
/// can relay it verbatim.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void append_all(std::ostringstream&) {}

template <typename T, typename... Rest>
void append_all(std::ostringstream& os, const T& value, const Rest&... rest) {
  os << value;
  append_all(os, rest...);
}

template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream os;
  append_all(os, parts...);
  return os.str();
}

}  // namespace detail

template <typename... Parts>
[[noreturn]] void raise(const Parts&... parts) {
  throw Error(detail::concat(parts...));
}

template <typename... Parts>
void require(bool condition, const Parts&... parts) {
  if (!condition) raise(parts...);
}

}  // namespace corrdyn
