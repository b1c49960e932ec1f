#ifndef OPTOKERR_ERROR_HPP
#define OPTOKERR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace okerr {

/// Bad inputs: violated preconditions, malformed configuration.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation ran but could not deliver a trustworthy result
/// (non-convergence, norm drift, positivity loss).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace okerr

#endif
