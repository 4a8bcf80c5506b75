#include "flatflow/error.hpp"

namespace flatflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidPolygon: return "InvalidPolygon";
    case ErrorCode::UnpairedEdge: return "UnpairedEdge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotAntiparallel: return "NotAntiparallel";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::BadConeAngle: return "BadConeAngle";
    case ErrorCode::IrrationalAngle: return "IrrationalAngle";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::VertexHit: return "VertexHit";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::NonpositiveInput: return "NonpositiveInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace flatflow
