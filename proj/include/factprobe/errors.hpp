#pragma once

#include <stdexcept>
#include <string>

namespace factprobe {

// Failure categories used across the toolkit. Every throwing operation
// documents which of these it raises.
enum class ErrorKind {
    empty_input,
    schema_violation,
    dangling_reference,
    duplicate_id,
    index_out_of_range,
    provider_failure,
    zero_vector,
    dimension_mismatch,
    backend_failure,
    score_out_of_range,
    non_finite_input,
    duplicate_name,
    unknown_adapter,
    missing_document,
    unexpected_document,
    empty_generation,
    unpaired_record,
    io_failure,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          message_(message) {}

    ErrorKind kind() const { return kind_; }

    // Message without the kind prefix, for rethrowing with added context.
    const std::string& message() const { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

#define FACTPROBE_DEFINE_ERROR(ClassName, kind_value)                                             \
    class ClassName : public Error {                                                              \
    public:                                                                                        \
        explicit ClassName(const std::string& message) : Error(ErrorKind::kind_value, message) {}  \
    }

FACTPROBE_DEFINE_ERROR(EmptyInputError, empty_input);
FACTPROBE_DEFINE_ERROR(SchemaViolationError, schema_violation);
FACTPROBE_DEFINE_ERROR(DanglingReferenceError, dangling_reference);
FACTPROBE_DEFINE_ERROR(DuplicateIdError, duplicate_id);
FACTPROBE_DEFINE_ERROR(IndexOutOfRangeError, index_out_of_range);
FACTPROBE_DEFINE_ERROR(ProviderFailureError, provider_failure);
FACTPROBE_DEFINE_ERROR(ZeroVectorError, zero_vector);
FACTPROBE_DEFINE_ERROR(DimensionMismatchError, dimension_mismatch);
FACTPROBE_DEFINE_ERROR(BackendFailureError, backend_failure);
FACTPROBE_DEFINE_ERROR(ScoreOutOfRangeError, score_out_of_range);
FACTPROBE_DEFINE_ERROR(NonFiniteInputError, non_finite_input);
FACTPROBE_DEFINE_ERROR(DuplicateNameError, duplicate_name);
FACTPROBE_DEFINE_ERROR(UnknownAdapterError, unknown_adapter);
FACTPROBE_DEFINE_ERROR(MissingDocumentError, missing_document);
FACTPROBE_DEFINE_ERROR(UnexpectedDocumentError, unexpected_document);
FACTPROBE_DEFINE_ERROR(EmptyGenerationError, empty_generation);
FACTPROBE_DEFINE_ERROR(UnpairedRecordError, unpaired_record);
FACTPROBE_DEFINE_ERROR(IoError, io_failure);

#undef FACTPROBE_DEFINE_ERROR

} // namespace factprobe
