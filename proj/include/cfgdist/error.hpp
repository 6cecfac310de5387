// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cfgdist
{
//! Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Arguments outside the mathematical domain of an operation.
class DomainError : public Error
{
  public:
    using Error::Error;
};

//! Iterative method (quadrature, root refinement) exhausted its budget.
class ConvergenceError : public Error
{
  public:
    using Error::Error;
};

//! Root finder called on an interval without a sign change.
class BracketError : public Error
{
  public:
    using Error::Error;
};

//! Requested allocation exceeds the configured memory budget.
class BudgetError : public Error
{
  public:
    using Error::Error;
};

//! Simulation state became non-finite.
class NumericalError : public Error
{
  public:
    using Error::Error;
};

namespace detail
{
inline void require(bool cond, const std::string& msg)
{
    if (!cond)
        throw DomainError(msg);
}
}  // namespace detail
}  // namespace cfgdist
