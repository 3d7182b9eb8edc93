#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpk/quantity.hpp"

namespace hpk {

using Json = nlohmann::ordered_json;

struct ObjectMeta {
    std::string ns = "default";
    std::string name;
    std::map<std::string, std::string> labels;
    std::map<std::string, std::string> annotations;
};

struct VolumeMount {
    std::string volumeName;
    std::string mountPath;
};

struct ResourceRequirements {
    std::optional<Quantity> cpuRequest;
    std::optional<Quantity> memoryRequest;
    std::optional<Quantity> cpuLimit;
    std::optional<Quantity> memoryLimit;
};

struct ContainerSpec {
    std::string name;
    std::string image;
    std::vector<std::string> command;
    std::vector<std::string> args;
    ResourceRequirements resources;
    std::vector<VolumeMount> volumeMounts;
};

struct HostPathVolume {
    std::string name;
    std::string hostPath;
};

enum class PodPhase { Pending, Running, Succeeded, Failed };
enum class RestartPolicy { Never, OnFailure };

struct PodStatus {
    PodPhase phase = PodPhase::Pending;
    std::string reason;
    std::string podIP;
    std::optional<int> exitCode;
};

struct PodResource {
    ObjectMeta meta;
    std::vector<ContainerSpec> containers;
    RestartPolicy restartPolicy = RestartPolicy::Never;
    std::string nodeName;
    std::vector<HostPathVolume> volumes;
    std::optional<std::int64_t> activeDeadlineSeconds;
    PodStatus status;
};

enum class ServiceType { ClusterIP, NodePort, LoadBalancer };

struct ServicePort {
    std::string name;
    int port = 0;
    int targetPort = 0;
};

struct ServiceResource {
    ObjectMeta meta;
    std::map<std::string, std::string> selector;
    std::vector<ServicePort> ports;
    std::optional<std::string> clusterIP;  // unset | "None" | explicit address
    ServiceType type = ServiceType::ClusterIP;
};

struct Parameter {
    std::string name;
    std::string value;
};

struct DagTask {
    std::string name;
    std::string templateRef;
    std::vector<std::string> dependencies;
    std::vector<Parameter> parameters;
    std::optional<std::vector<std::string>> withItems;
};

// A container template with {{inputs.parameters.X}} placeholders in its
// annotations, command, and args.
struct PodTemplate {
    std::map<std::string, std::string> annotations;
    std::vector<std::string> inputParameters;
    ContainerSpec container;
};

struct WorkflowTemplate {
    std::string name;
    std::optional<std::vector<DagTask>> dag;
    std::optional<PodTemplate> pod;
};

enum class StepPhase { Waiting, Pending, Running, Succeeded, Failed, Skipped };

struct StepRecord {
    std::string task;
    std::string stepName;  // "<task>(<index>:<item>)" for fan-out steps
    std::string podName;
    StepPhase phase = StepPhase::Waiting;
};

enum class WorkflowPhase { Pending, Running, Succeeded, Failed };

struct WorkflowStatus {
    WorkflowPhase phase = WorkflowPhase::Pending;
    std::string message;
    std::vector<StepRecord> steps;
};

struct WorkflowResource {
    ObjectMeta meta;
    std::string entrypoint;
    std::vector<WorkflowTemplate> templates;
    WorkflowStatus status;
};

struct NodeResource {
    std::string name;
    int cpus = 0;
    std::int64_t memMiB = 0;
};

using Resource = std::variant<PodResource, ServiceResource, WorkflowResource, NodeResource>;

std::string kind_of(const Resource& r);
const ObjectMeta* meta_of(const Resource& r);
std::string namespace_of(const Resource& r);  // "" for cluster-scoped kinds
std::string name_of(const Resource& r);

const char* to_string(PodPhase p);
const char* to_string(ServiceType t);
const char* to_string(RestartPolicy p);
const char* to_string(WorkflowPhase p);
const char* to_string(StepPhase p);

// Canonical JSON form with deterministic field order; usable both as the
// serialization surface and as the store-dump payload. from-JSON accepts the
// same shape and collects warnings for ignored unknown fields.
Json to_json(const Resource& r);
Json to_json(const PodResource& p);
Json to_json(const ServiceResource& s);
Json to_json(const WorkflowResource& w);
Json to_json(const NodeResource& n);

Resource resource_from_json(const std::string& kind, const Json& doc,
                            std::vector<std::string>& warnings);

// Spec-only view of a pod (status stripped), used to detect status-only writes.
Json pod_spec_fingerprint(const PodResource& p);

}  // namespace hpk
