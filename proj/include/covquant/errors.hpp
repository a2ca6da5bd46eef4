#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace covquant {

// Error classes map onto CLI exit codes: 2 usage, 3 computation, 4 recovery.
enum class ErrorCode : int { Usage = 2, Computation = 3, RecoveryDeviation = 4 };

class Error : public std::runtime_error {
public:
    explicit Error(std::string what, ErrorCode code = ErrorCode::Computation)
        : std::runtime_error(std::move(what)), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define COVQUANT_DEFINE_ERROR(Name)                                            \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}   \
    }

COVQUANT_DEFINE_ERROR(NonHermitianInput);
COVQUANT_DEFINE_ERROR(NonUnitaryConjugator);
COVQUANT_DEFINE_ERROR(NotPositive);
COVQUANT_DEFINE_ERROR(InvalidGrid);
COVQUANT_DEFINE_ERROR(OffGridElement);
COVQUANT_DEFINE_ERROR(NotRankOneProjection);
COVQUANT_DEFINE_ERROR(CarrierMismatch);
COVQUANT_DEFINE_ERROR(DimensionMismatch);
COVQUANT_DEFINE_ERROR(UnsummableFunction);
COVQUANT_DEFINE_ERROR(TranslationLeavesGrid);
COVQUANT_DEFINE_ERROR(IncompleteTable);
COVQUANT_DEFINE_ERROR(NotPositiveRecovered);
COVQUANT_DEFINE_ERROR(NotInDomain);
COVQUANT_DEFINE_ERROR(NotMonotone);
COVQUANT_DEFINE_ERROR(UnboundedSequence);
COVQUANT_DEFINE_ERROR(InvalidArgument);
COVQUANT_DEFINE_ERROR(IoError);

#undef COVQUANT_DEFINE_ERROR

} // namespace covquant
