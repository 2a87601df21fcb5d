#pragma once

#include <stdexcept>
#include <string>

namespace hk {

enum class ErrorKind {
    BadDimensions,
    BadIndex,
    ChargeMismatch,
    DegreeOverflow,
    Inconsistent,
    Underdetermined,
    OrderExceeded,
    NonPolynomialInverse,
    MissingEquivariance,
    InvalidPrepotential,
    NoFixedPoint,
    RankDeficient,
    FlowDiverged,
    SingularFrame,
    NotClosed,
    ParseError,
    NonzeroTorsion,
    RouteMismatch,
    NoConvergence,
    SingularJacobian,
    NotCharge4,
    DependsOnZPlus,
    NonzeroAtOrigin,
    ShapeMismatch,
    OutOfChart,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace hk
