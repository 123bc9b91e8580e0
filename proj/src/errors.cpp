#include "sphere_growth/errors.hpp"

namespace sphere_growth {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidMap: return "InvalidMap";
    case ErrorKind::EntireAtInfinity: return "EntireAtInfinity";
    case ErrorKind::MeromorphicIterationUnsupported: return "MeromorphicIterationUnsupported";
    case ErrorKind::PoleOnCircle: return "PoleOnCircle";
    case ErrorKind::RootFindingFailed: return "RootFindingFailed";
    case ErrorKind::SaturatedOrbit: return "SaturatedOrbit";
  }
  return "Unknown";
}

}  // namespace sphere_growth
