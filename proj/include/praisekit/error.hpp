#pragma once

#include <stdexcept>
#include <string>

namespace praisekit {

/// Base class for all praisekit exceptions.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define PRAISEKIT_DEFINE_ERROR(Name)                               \
  struct Name : Error {                                            \
    explicit Name(const std::string& msg) : Error(msg) {}          \
  }

// corpus / dataset
PRAISEKIT_DEFINE_ERROR(MisalignedSpan);
PRAISEKIT_DEFINE_ERROR(OverlappingSpans);
PRAISEKIT_DEFINE_ERROR(CountOutOfRange);
PRAISEKIT_DEFINE_ERROR(ValidationError);

// metrics
PRAISEKIT_DEFINE_ERROR(TokenMismatch);
PRAISEKIT_DEFINE_ERROR(MissingPrediction);
PRAISEKIT_DEFINE_ERROR(EmptyInput);

// provider
PRAISEKIT_DEFINE_ERROR(ProviderError);
struct AuthMissing : ProviderError {
  explicit AuthMissing(const std::string& msg) : ProviderError(msg) {}
};
struct Timeout : ProviderError {
  explicit Timeout(const std::string& msg) : ProviderError(msg) {}
};
struct RateLimited : ProviderError {
  explicit RateLimited(const std::string& msg) : ProviderError(msg) {}
};
struct MalformedResponse : ProviderError {
  explicit MalformedResponse(const std::string& msg) : ProviderError(msg) {}
};

// augmentation
PRAISEKIT_DEFINE_ERROR(EmptyLexicon);

// finetune
PRAISEKIT_DEFINE_ERROR(SchemeMismatch);
PRAISEKIT_DEFINE_ERROR(NoJsonFound);
PRAISEKIT_DEFINE_ERROR(InvalidJson);
PRAISEKIT_DEFINE_ERROR(WrongValueType);

// stats
PRAISEKIT_DEFINE_ERROR(EmptySample);
PRAISEKIT_DEFINE_ERROR(DivisionByZero);

// harness / io
PRAISEKIT_DEFINE_ERROR(IoError);
PRAISEKIT_DEFINE_ERROR(ConfigError);

#undef PRAISEKIT_DEFINE_ERROR

}  // namespace praisekit
