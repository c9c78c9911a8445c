#include "factprobe/errors.hpp"

namespace factprobe {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::schema_violation: return "schema_violation";
    case ErrorKind::dangling_reference: return "dangling_reference";
    case ErrorKind::duplicate_id: return "duplicate_id";
    case ErrorKind::index_out_of_range: return "index_out_of_range";
    case ErrorKind::provider_failure: return "provider_failure";
    case ErrorKind::zero_vector: return "zero_vector";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::backend_failure: return "backend_failure";
    case ErrorKind::score_out_of_range: return "score_out_of_range";
    case ErrorKind::non_finite_input: return "non_finite_input";
    case ErrorKind::duplicate_name: return "duplicate_name";
    case ErrorKind::unknown_adapter: return "unknown_adapter";
    case ErrorKind::missing_document: return "missing_document";
    case ErrorKind::unexpected_document: return "unexpected_document";
    case ErrorKind::empty_generation: return "empty_generation";
    case ErrorKind::unpaired_record: return "unpaired_record";
    case ErrorKind::io_failure: return "io_failure";
    }
    return "error";
}

} // namespace factprobe
