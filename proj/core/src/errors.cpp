#include "hmpii/errors.hpp"

namespace hmpii {

const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::OnCut: return "OnCut";
    case ErrorKind::DegenerateEndpoints: return "DegenerateEndpoints";
    case ErrorKind::WrongRegion: return "WrongRegion";
    case ErrorKind::TraceFailure: return "TraceFailure";
    case ErrorKind::RealityViolation: return "RealityViolation";
    case ErrorKind::NormalizationFailure: return "NormalizationFailure";
    case ErrorKind::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::NearPole: return "NearPole";
    case ErrorKind::ThetaZero: return "ThetaZero";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::RegionViolation: return "RegionViolation";
    case ErrorKind::OutOfSegment: return "OutOfSegment";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::PathStall: return "PathStall";
    case ErrorKind::Uncovered: return "Uncovered";
    case ErrorKind::PoleProximity: return "PoleProximity";
    }
    return "Unknown";
}

}  // namespace hmpii
