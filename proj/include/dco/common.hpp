#pragma once

#include <stdexcept>
#include <string>

namespace dco {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

struct InvalidConfig : Error {
  using Error::Error;
};

struct NumericalFailure : Error {
  using Error::Error;
};

struct EmptyDataset : Error {
  using Error::Error;
};

struct SearchDiverged : Error {
  using Error::Error;
};

struct IncompatibleModel : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace dco
