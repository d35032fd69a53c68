#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tspe {

// Base of every error raised by the toolkit. The category string is stable
// and machine-checkable; the CLI prints it verbatim and maps it to exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(category + ": " + message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

#define TSPE_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& m) : Error(#Name, m) {}         \
    }

TSPE_DEFINE_ERROR(UnknownDataset);
TSPE_DEFINE_ERROR(ConfigError);
TSPE_DEFINE_ERROR(BackendUnavailable);
TSPE_DEFINE_ERROR(GenerationExhausted);
TSPE_DEFINE_ERROR(UnboundSlot);
TSPE_DEFINE_ERROR(InsufficientCandidates);
TSPE_DEFINE_ERROR(CurationAborted);
TSPE_DEFINE_ERROR(BackendLoadError);
TSPE_DEFINE_ERROR(EncodeError);
TSPE_DEFINE_ERROR(AudioDecodeError);
TSPE_DEFINE_ERROR(CacheError);
TSPE_DEFINE_ERROR(ZeroVector);
TSPE_DEFINE_ERROR(DimensionMismatch);
TSPE_DEFINE_ERROR(ManifestError);
TSPE_DEFINE_ERROR(CategoryMismatch);
TSPE_DEFINE_ERROR(MismatchedRuns);
TSPE_DEFINE_ERROR(RunLockError);
TSPE_DEFINE_ERROR(UsageError);

#undef TSPE_DEFINE_ERROR

}  // namespace tspe
