// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_ERROR_HPP
#define LINER_ERROR_HPP

#include <stdexcept>
#include <string>

namespace liner
{

// A violated precondition on user-supplied data. The CLI maps it to exit code 1.
class ValidationError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// A numerical failure (singular factorization, residual too large, ...). Exit code 2.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string &message)
{
  if (!condition)
  {
    throw ValidationError(message);
  }
}

}  // namespace liner

#endif  // LINER_ERROR_HPP
