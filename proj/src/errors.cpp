#include "hk/errors.hpp"

namespace hk {

const char* error_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::BadDimensions: return "BadDimensions";
        case ErrorKind::BadIndex: return "BadIndex";
        case ErrorKind::ChargeMismatch: return "ChargeMismatch";
        case ErrorKind::DegreeOverflow: return "DegreeOverflow";
        case ErrorKind::Inconsistent: return "Inconsistent";
        case ErrorKind::Underdetermined: return "Underdetermined";
        case ErrorKind::OrderExceeded: return "OrderExceeded";
        case ErrorKind::NonPolynomialInverse: return "NonPolynomialInverse";
        case ErrorKind::MissingEquivariance: return "MissingEquivariance";
        case ErrorKind::InvalidPrepotential: return "InvalidPrepotential";
        case ErrorKind::NoFixedPoint: return "NoFixedPoint";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::FlowDiverged: return "FlowDiverged";
        case ErrorKind::SingularFrame: return "SingularFrame";
        case ErrorKind::NotClosed: return "NotClosed";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::NonzeroTorsion: return "NonzeroTorsion";
        case ErrorKind::RouteMismatch: return "RouteMismatch";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SingularJacobian: return "SingularJacobian";
        case ErrorKind::NotCharge4: return "NotCharge4";
        case ErrorKind::DependsOnZPlus: return "DependsOnZPlus";
        case ErrorKind::NonzeroAtOrigin: return "NonzeroAtOrigin";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::OutOfChart: return "OutOfChart";
    }
    return "Unknown";
}

}  // namespace hk
