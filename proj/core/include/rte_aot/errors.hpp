#pragma once

#include <stdexcept>
#include <string>

namespace rte_aot
{
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Invalid argument: bad counts, non-unit directions, out-of-range parameters.
class ArgumentError : public Error
{
  public:
    using Error::Error;
};

//! A point lies outside the closure of the domain.
class DomainError : public Error
{
  public:
    using Error::Error;
};

//! Neither the absorption nor the smallness condition holds.
class InadmissibleMedium : public Error
{
  public:
    using Error::Error;
};

//! The collision series failed to contract.
class DivergenceError : public Error
{
  public:
    using Error::Error;
};

}  // namespace rte_aot
