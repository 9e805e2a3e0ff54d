#include "fppgeo/error.hpp"

namespace fppgeo {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Bounds: return "bounds error";
    case ErrorCode::Io: return "I/O error";
    case ErrorCode::InsufficientSamples: return "insufficient samples";
    case ErrorCode::EmptyMaximizerSet: return "empty maximizer set";
    case ErrorCode::InsufficientLength: return "insufficient length";
    case ErrorCode::BoundaryReached: return "boundary reached";
    case ErrorCode::OriginNotPercolating: return "origin not percolating";
    case ErrorCode::CensoredBeforeFound: return "censored before found";
    case ErrorCode::PreconditionDiagonal: return "origins not on a common anti-diagonal";
    case ErrorCode::Disconnected: return "disconnected";
    case ErrorCode::WindowExhausted: return "window exhausted";
    case ErrorCode::NotOrientedOpen: return "not an oriented open path";
    case ErrorCode::NotBidirectional: return "not bi-directional";
    case ErrorCode::SubcriticalSuspected: return "subcritical suspected";
    }
    return "unknown error";
}

} // namespace fppgeo
