#pragma once

#include <stdexcept>
#include <string>

namespace hpk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// manifest-model
struct BadQuantity : Error { using Error::Error; };
struct MalformedYaml : Error { using Error::Error; };
struct MissingField : Error { using Error::Error; };
struct UnsupportedKind : Error { using Error::Error; };

// control-plane
struct ValidationFailed : Error { using Error::Error; };
struct AdmissionRejected : Error { using Error::Error; };

// translator
struct BadAnnotationSyntax : Error { using Error::Error; };
struct UnallocatedIP : Error { using Error::Error; };

// slurm-sim
struct UnknownJob : Error { using Error::Error; };
struct NeverSchedulable : Error { using Error::Error; };

// network
struct SubnetExhausted : Error { using Error::Error; };
struct AlreadyAllocated : Error { using Error::Error; };
struct NotAllocated : Error { using Error::Error; };

// kubelet
struct EmptyCluster : Error { using Error::Error; };

// workflow
struct CycleDetected : Error { using Error::Error; };
struct UnboundParameter : Error { using Error::Error; };
struct UndeclaredPlaceholder : Error { using Error::Error; };

// cli / engine
struct NotFound : Error { using Error::Error; };
struct NotSubmitted : Error { using Error::Error; };
struct NonQuiescent : Error { using Error::Error; };

}  // namespace hpk
