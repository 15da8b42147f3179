#pragma once

#include <stdexcept>

namespace stir {

// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error { using Error::Error; };
struct OrderViolation : Error { using Error::Error; };
struct BondOutOfRange : Error { using Error::Error; };
struct WrongModel : Error { using Error::Error; };
struct StateSpaceTooLarge : Error { using Error::Error; };
struct WindowTooSparse : Error { using Error::Error; };
struct AllZeroTail : Error { using Error::Error; };
struct MissingRates : Error { using Error::Error; };

}  // namespace stir
