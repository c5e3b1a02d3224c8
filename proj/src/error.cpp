#include "hdna/error.hpp"

namespace hdna {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kCharsetUndecodable: return "CharsetUndecodable";
    case ErrorKind::kVersionMismatch: return "VersionMismatch";
    case ErrorKind::kTimeout: return "Timeout";
    case ErrorKind::kTooManyRedirects: return "TooManyRedirects";
    case ErrorKind::kBodyTooLarge: return "BodyTooLarge";
    case ErrorKind::kNetworkError: return "NetworkError";
    case ErrorKind::kNonSuccessStatus: return "NonSuccessStatus";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kCorruptBaseline: return "CorruptBaseline";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace hdna
