#ifndef ADAPT_ERROR_HPP
#define ADAPT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace adapt {

enum class Errc {
    MalformedRow,
    NonMonotonicTimestamp,
    OutOfRangeValue,
    UnparseableLine,
    MissingSubjectLabel,
    SeriesTooShort,
    KExceedsPoints,
    EmptyInput,
    CurveTooShort,
    ModelNotBinary,
    WrongMetric,
    InsufficientHistory,
    EmptyDataset,
    Diverged,
    DimensionMismatch,
    LengthMismatch,
    ZeroActual,
    UnknownDevice,
    UnknownService,
    CapacityExhausted,
    UnknownSubcommand,
    InvalidConfig,
    IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace adapt

#endif
