#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hmpii {

using cplx = std::complex<double>;

enum class ErrorKind {
    NonConvergence,
    NonFinite,
    OnCut,
    DegenerateEndpoints,
    WrongRegion,
    TraceFailure,
    RealityViolation,
    NormalizationFailure,
    TruncationInsufficient,
    AssumptionViolated,
    NearPole,
    ThetaZero,
    GridTooCoarse,
    NewtonDivergence,
    RegionViolation,
    OutOfSegment,
    Overflow,
    SingularSystem,
    PathStall,
    Uncovered,
    PoleProximity
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, cplx where = cplx(0.0, 0.0))
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), where_(where) {}

    ErrorKind kind() const { return kind_; }
    // Location attached to the failure (pole estimate for PoleProximity).
    cplx where() const { return where_; }

private:
    ErrorKind kind_;
    cplx where_;
};

}  // namespace hmpii
