#include "vecseg/error.hpp"

namespace vecseg {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedMarkup: return "MalformedMarkup";
        case ErrorKind::UnsupportedSvgFeature: return "UnsupportedSvgFeature";
        case ErrorKind::NonInvertibleTransform: return "NonInvertibleTransform";
        case ErrorKind::UnsupportedTransformKind: return "UnsupportedTransformKind";
        case ErrorKind::BadPathData: return "BadPathData";
        case ErrorKind::EmptyDrawing: return "EmptyDrawing";
        case ErrorKind::DuplicateLeaf: return "DuplicateLeaf";
        case ErrorKind::NonForestHierarchy: return "NonForestHierarchy";
        case ErrorKind::SparseIds: return "SparseIds";
        case ErrorKind::UnknownLeaf: return "UnknownLeaf";
        case ErrorKind::NonFiniteInput: return "NonFiniteInput";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::UnlabeledNode: return "UnlabeledNode";
        case ErrorKind::DivergedLoss: return "DivergedLoss";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::EmptyReport: return "EmptyReport";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::BadFormat: return "BadFormat";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace vecseg
