#ifndef OPTOKERR_FORMAT_HPP
#define OPTOKERR_FORMAT_HPP

#include <charconv>
#include <string>

namespace okerr {

/// Shortest text that parses back to exactly x.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace okerr

#endif
