#pragma once

#include <stdexcept>
#include <string>

namespace hfd {

//! Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Malformed or non-finite input data.
class InputError : public Error
{
public:
  using Error::Error;
};

//! Shapes that do not agree (column counts, vector lengths).
class DimensionError : public Error
{
public:
  using Error::Error;
};

//! Hyperparameters that violate their invariants (K > p, eps <= 0, ...).
class ConfigError : public Error
{
public:
  using Error::Error;
};

//! A basis or subset index that does not exist or is malformed.
class IndexError : public Error
{
public:
  using Error::Error;
};

//! Evaluation outside the domain of a function.
class DomainError : public Error
{
public:
  using Error::Error;
};

//! Serialized documents with a wrong or unsupported layout.
class SchemaError : public Error
{
public:
  using Error::Error;
};

} // namespace hfd
