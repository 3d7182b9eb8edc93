#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hpk/model.hpp"

namespace hpk {

// One document out of a multi-document YAML stream. Unsupported kinds and
// per-document field errors are reported here instead of aborting the stream.
struct ParsedDocument {
    std::optional<Resource> resource;
    std::string error;  // empty on success
};

struct ManifestResult {
    std::vector<ParsedDocument> documents;
    std::vector<std::string> warnings;  // unknown fields, ignored but recorded
};

// Parses a multi-document YAML stream (documents separated by ---) into typed
// resources, in document order. Throws MalformedYaml only for syntax errors;
// anything document-local lands in the corresponding ParsedDocument.
ManifestResult parse_manifest(const std::string& text);

// Canonical serialization with deterministic field order. The output is JSON,
// which parse_manifest accepts back (YAML superset), so parse ∘ serialize is
// the identity on the supported field set.
std::string serialize_resource(const Resource& r);

// Accumulated pod invariant violations; empty means valid. Never throws.
std::vector<std::string> validate_pod(const PodResource& pod);

std::vector<std::string> validate_workflow(const WorkflowResource& wf);

}  // namespace hpk
