#pragma once

#include <stdexcept>
#include <string>

namespace staa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define STAA_DEFINE_ERROR(Name)          \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

// graph_core
STAA_DEFINE_ERROR(InvalidGraphError);
STAA_DEFINE_ERROR(ZeroRowError);

// spectral
STAA_DEFINE_ERROR(ConvergenceError);
STAA_DEFINE_ERROR(NoSpectrumError);

// activity / config
STAA_DEFINE_ERROR(ConfigError);

// diffusion
STAA_DEFINE_ERROR(InvalidBetaError);
STAA_DEFINE_ERROR(SingularSystemError);
STAA_DEFINE_ERROR(MaxItersError);

// synth
STAA_DEFINE_ERROR(DegenerateSpecError);

// eval
STAA_DEFINE_ERROR(IndexError);
STAA_DEFINE_ERROR(ExhaustedError);
STAA_DEFINE_ERROR(DegenerateError);

// io
STAA_DEFINE_ERROR(ParseError);
STAA_DEFINE_ERROR(NegativeTimestampError);
STAA_DEFINE_ERROR(EmptyStreamError);
STAA_DEFINE_ERROR(IoError);

#undef STAA_DEFINE_ERROR

}  // namespace staa
