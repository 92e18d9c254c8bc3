#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scb {

enum class Errc {
  InvalidArgument,
  InvalidBand,
  UnstableDesign,
  TooShort,
  IrrationalRatio,
  MissingChannel,
  RankDeficient,
  BadIndex,
  NonFinite,
  Degenerate,
  CalibrationTooSmall,
  Singular,
  EmptyInput,
  SingleSubject,
  AngleOutOfRange,
  MalformedAck,
  Aborted,
  EmptyTrace,
  BadMagic,
  TruncatedPayload,
  BadEventRow,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

// Every recoverable failure in the library is reported as an Error carrying
// one of the codes above; callers that care switch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidBand: return "InvalidBand";
    case Errc::UnstableDesign: return "UnstableDesign";
    case Errc::TooShort: return "TooShort";
    case Errc::IrrationalRatio: return "IrrationalRatio";
    case Errc::MissingChannel: return "MissingChannel";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::BadIndex: return "BadIndex";
    case Errc::NonFinite: return "NonFinite";
    case Errc::Degenerate: return "Degenerate";
    case Errc::CalibrationTooSmall: return "CalibrationTooSmall";
    case Errc::Singular: return "Singular";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::SingleSubject: return "SingleSubject";
    case Errc::AngleOutOfRange: return "AngleOutOfRange";
    case Errc::MalformedAck: return "MalformedAck";
    case Errc::Aborted: return "Aborted";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::BadMagic: return "BadMagic";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::BadEventRow: return "BadEventRow";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace scb
