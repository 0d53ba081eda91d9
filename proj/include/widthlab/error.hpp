#pragma once

#include <stdexcept>
#include <string>

namespace widthlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define WIDTHLAB_ERROR(Name)                 \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(#Name ": " + what) {}        \
  }

WIDTHLAB_ERROR(RankDeficient);
WIDTHLAB_ERROR(DimensionMismatch);
WIDTHLAB_ERROR(SingularMatrix);
WIDTHLAB_ERROR(BadDimensions);
WIDTHLAB_ERROR(PreconditionFailed);
WIDTHLAB_ERROR(CannotSatisfy);
WIDTHLAB_ERROR(SpectrumExhausted);
WIDTHLAB_ERROR(VarianceBlowup);
WIDTHLAB_ERROR(Saturation);
WIDTHLAB_ERROR(BadOrder);
WIDTHLAB_ERROR(NotMonotone);
WIDTHLAB_ERROR(ConfigError);

#undef WIDTHLAB_ERROR

}  // namespace widthlab
