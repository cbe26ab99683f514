#include "qmtherm/error.hpp"

namespace qmtherm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorKind::MalformedInstrument: return "MalformedInstrument";
    case ErrorKind::MalformedProcess: return "MalformedProcess";
    case ErrorKind::AmbiguousClassification: return "AmbiguousClassification";
    case ErrorKind::ThirdLawObstruction: return "ThirdLawObstruction";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace qmtherm
