#include "dve/error.hpp"

namespace dve {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SchedulingInPast: return "SchedulingInPast";
    case ErrorCode::ClockSkewOutOfBounds: return "ClockSkewOutOfBounds";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::DuplicateCreate: return "DuplicateCreate";
    case ErrorCode::OutOfRegion: return "OutOfRegion";
    case ErrorCode::AlreadyMigrating: return "AlreadyMigrating";
    case ErrorCode::UnknownMigration: return "UnknownMigration";
    case ErrorCode::UnknownLink: return "UnknownLink";
    case ErrorCode::UnroutableMessage: return "UnroutableMessage";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::StressedRunIncluded: return "StressedRunIncluded";
    case ErrorCode::TooFewRuns: return "TooFewRuns";
    case ErrorCode::WrongSampleCount: return "WrongSampleCount";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::BoundsDoNotBracket: return "BoundsDoNotBracket";
    case ErrorCode::UnknownMetric: return "UnknownMetric";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace dve
