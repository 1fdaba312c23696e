#pragma once

#include <stdexcept>
#include <string>

namespace auditlab {

class AuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define AUDITLAB_ERROR(Name)                                   \
    class Name : public AuditError {                           \
    public:                                                    \
        explicit Name(const std::string& what)                 \
            : AuditError(std::string(#Name ": ") + what) {}    \
    }

AUDITLAB_ERROR(DomainError);
AUDITLAB_ERROR(ParamOutOfSet);
AUDITLAB_ERROR(StreamExhausted);
AUDITLAB_ERROR(IllPosed);
AUDITLAB_ERROR(AccessError);
AUDITLAB_ERROR(InsufficientHistory);
AUDITLAB_ERROR(AcceptanceFailure);
AUDITLAB_ERROR(DegenerateMoments);
AUDITLAB_ERROR(DegenerateData);
AUDITLAB_ERROR(InfeasibleIntersection);
AUDITLAB_ERROR(InsufficientSamples);
AUDITLAB_ERROR(NoMajorityCandidate);
AUDITLAB_ERROR(SchemaError);
AUDITLAB_ERROR(RowError);
AUDITLAB_ERROR(IoError);
AUDITLAB_ERROR(ConfigError);

#undef AUDITLAB_ERROR

}  // namespace auditlab
