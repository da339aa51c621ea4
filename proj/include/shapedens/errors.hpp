#ifndef SHAPEDENS_ERRORS_HPP_
#define SHAPEDENS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace shapedens {

enum class Errc {
  EmptyInput,
  NonPositiveValue,
  NonFiniteValue,
  NegativeArgument,
  NonPositiveKnot,
  UnsortedInput,
  NonConcaveModel,
  NonConvexModel,
  ZeroDensityAtObservation,
  SingularGram,
  InitialSupportInfeasible,
  ParameterOutOfRange,
  InvalidModelSpec,
  InvalidFitFile,
  InvalidDataFile,
  IoError,
};

const char* errc_name(Errc c);

/// Library-wide exception. `index` identifies the offending element where
/// that makes sense (-1 otherwise).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, long index = -1)
      : std::runtime_error(what), code_(code), index_(index) {}

  Errc code() const { return code_; }
  long index() const { return index_; }
  const char* tag() const { return errc_name(code_); }

 private:
  Errc code_;
  long index_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NonPositiveValue: return "NonPositiveValue";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::NegativeArgument: return "NegativeArgument";
    case Errc::NonPositiveKnot: return "NonPositiveKnot";
    case Errc::UnsortedInput: return "UnsortedInput";
    case Errc::NonConcaveModel: return "NonConcaveModel";
    case Errc::NonConvexModel: return "NonConvexModel";
    case Errc::ZeroDensityAtObservation: return "ZeroDensityAtObservation";
    case Errc::SingularGram: return "SingularGram";
    case Errc::InitialSupportInfeasible: return "InitialSupportInfeasible";
    case Errc::ParameterOutOfRange: return "ParameterOutOfRange";
    case Errc::InvalidModelSpec: return "InvalidModelSpec";
    case Errc::InvalidFitFile: return "InvalidFitFile";
    case Errc::InvalidDataFile: return "InvalidDataFile";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace shapedens

#endif  // SHAPEDENS_ERRORS_HPP_
