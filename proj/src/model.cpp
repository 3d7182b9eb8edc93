#include "hpk/model.hpp"

#include <algorithm>

#include "hpk/errors.hpp"

namespace hpk {

namespace {

void warn_unknown(const Json& obj, std::initializer_list<const char*> known,
                  const std::string& path, std::vector<std::string>& warnings) {
    if (!obj.is_object()) return;
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end()) {
            warnings.push_back("ignoring unknown field " + path + "." + key);
        }
    }
}

std::string require_string(const Json& obj, const char* field, const std::string& path) {
    if (!obj.is_object() || !obj.contains(field) || !obj[field].is_string() ||
        obj[field].get<std::string>().empty()) {
        throw MissingField(path + "." + field);
    }
    return obj[field].get<std::string>();
}

std::string scalar_to_string(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) {
        Json j = v;
        return j.dump();
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    throw MissingField("expected scalar, got " + v.dump());
}

std::vector<std::string> string_list(const Json& v, const std::string& path) {
    if (!v.is_array()) throw MissingField(path + " (expected list)");
    std::vector<std::string> out;
    for (const auto& item : v) out.push_back(scalar_to_string(item));
    return out;
}

std::map<std::string, std::string> string_map(const Json& v) {
    std::map<std::string, std::string> out;
    if (!v.is_object()) return out;
    for (const auto& [key, value] : v.items()) out[key] = scalar_to_string(value);
    return out;
}

Json map_to_json(const std::map<std::string, std::string>& m) {
    Json out = Json::object();
    for (const auto& [k, v] : m) out[k] = v;
    return out;
}

ObjectMeta meta_from_json(const Json& doc, const std::string& kind,
                          std::vector<std::string>& warnings) {
    if (!doc.contains("metadata")) throw MissingField(kind + ".metadata");
    const Json& m = doc["metadata"];
    ObjectMeta meta;
    meta.name = require_string(m, "name", kind + ".metadata");
    if (m.contains("namespace")) meta.ns = scalar_to_string(m["namespace"]);
    if (m.contains("labels")) meta.labels = string_map(m["labels"]);
    if (m.contains("annotations")) meta.annotations = string_map(m["annotations"]);
    warn_unknown(m, {"name", "namespace", "labels", "annotations"}, kind + ".metadata",
                 warnings);
    return meta;
}

Json meta_to_json(const ObjectMeta& meta) {
    Json m;
    m["name"] = meta.name;
    m["namespace"] = meta.ns;
    if (!meta.labels.empty()) m["labels"] = map_to_json(meta.labels);
    if (!meta.annotations.empty()) m["annotations"] = map_to_json(meta.annotations);
    return m;
}

std::optional<Quantity> quantity_field(const Json& obj, const char* field,
                                       ResourceKind kind) {
    if (!obj.is_object() || !obj.contains(field)) return std::nullopt;
    return parse_quantity(scalar_to_string(obj[field]), kind);
}

ResourceRequirements requirements_from_json(const Json& r, const std::string& path,
                                            std::vector<std::string>& warnings) {
    ResourceRequirements out;
    if (r.contains("requests")) {
        out.cpuRequest = quantity_field(r["requests"], "cpu", ResourceKind::Cpu);
        out.memoryRequest = quantity_field(r["requests"], "memory", ResourceKind::Memory);
        warn_unknown(r["requests"], {"cpu", "memory"}, path + ".requests", warnings);
    }
    if (r.contains("limits")) {
        out.cpuLimit = quantity_field(r["limits"], "cpu", ResourceKind::Cpu);
        out.memoryLimit = quantity_field(r["limits"], "memory", ResourceKind::Memory);
        warn_unknown(r["limits"], {"cpu", "memory"}, path + ".limits", warnings);
    }
    warn_unknown(r, {"requests", "limits"}, path, warnings);
    return out;
}

ContainerSpec container_from_json(const Json& c, const std::string& path,
                                  std::vector<std::string>& warnings) {
    ContainerSpec spec;
    spec.name = c.contains("name") ? scalar_to_string(c["name"]) : "";
    spec.image = require_string(c, "image", path);
    if (c.contains("command")) spec.command = string_list(c["command"], path + ".command");
    if (c.contains("args")) spec.args = string_list(c["args"], path + ".args");
    if (c.contains("resources"))
        spec.resources = requirements_from_json(c["resources"], path + ".resources", warnings);
    if (c.contains("volumeMounts")) {
        for (const auto& vm : c["volumeMounts"]) {
            spec.volumeMounts.push_back(
                {require_string(vm, "name", path + ".volumeMounts"),
                 require_string(vm, "mountPath", path + ".volumeMounts")});
            warn_unknown(vm, {"name", "mountPath"}, path + ".volumeMounts", warnings);
        }
    }
    warn_unknown(c, {"name", "image", "command", "args", "resources", "volumeMounts"},
                 path, warnings);
    return spec;
}

Json container_to_json(const ContainerSpec& c) {
    Json j;
    j["name"] = c.name;
    j["image"] = c.image;
    if (!c.command.empty()) j["command"] = c.command;
    if (!c.args.empty()) j["args"] = c.args;
    Json resources = Json::object();
    Json requests = Json::object();
    Json limits = Json::object();
    if (c.resources.cpuRequest) requests["cpu"] = c.resources.cpuRequest->text;
    if (c.resources.memoryRequest) requests["memory"] = c.resources.memoryRequest->text;
    if (c.resources.cpuLimit) limits["cpu"] = c.resources.cpuLimit->text;
    if (c.resources.memoryLimit) limits["memory"] = c.resources.memoryLimit->text;
    if (!requests.empty()) resources["requests"] = requests;
    if (!limits.empty()) resources["limits"] = limits;
    if (!resources.empty()) j["resources"] = resources;
    if (!c.volumeMounts.empty()) {
        Json mounts = Json::array();
        for (const auto& vm : c.volumeMounts)
            mounts.push_back({{"name", vm.volumeName}, {"mountPath", vm.mountPath}});
        j["volumeMounts"] = mounts;
    }
    return j;
}

RestartPolicy restart_policy_from_string(const std::string& s) {
    if (s == "Never") return RestartPolicy::Never;
    if (s == "OnFailure") return RestartPolicy::OnFailure;
    throw MissingField("spec.restartPolicy: unsupported value \"" + s + "\"");
}

PodPhase pod_phase_from_string(const std::string& s) {
    if (s == "Pending") return PodPhase::Pending;
    if (s == "Running") return PodPhase::Running;
    if (s == "Succeeded") return PodPhase::Succeeded;
    if (s == "Failed") return PodPhase::Failed;
    throw MissingField("status.phase: unsupported value \"" + s + "\"");
}

PodResource pod_from_json(const Json& doc, std::vector<std::string>& warnings) {
    PodResource pod;
    pod.meta = meta_from_json(doc, "Pod", warnings);
    if (!doc.contains("spec")) throw MissingField("Pod.spec");
    const Json& spec = doc["spec"];
    if (!spec.contains("containers") || !spec["containers"].is_array())
        throw MissingField("Pod.spec.containers");
    int idx = 0;
    for (const auto& c : spec["containers"]) {
        pod.containers.push_back(container_from_json(
            c, "Pod.spec.containers[" + std::to_string(idx++) + "]", warnings));
    }
    if (spec.contains("restartPolicy"))
        pod.restartPolicy = restart_policy_from_string(scalar_to_string(spec["restartPolicy"]));
    if (spec.contains("nodeName")) pod.nodeName = scalar_to_string(spec["nodeName"]);
    if (spec.contains("volumes")) {
        for (const auto& v : spec["volumes"]) {
            HostPathVolume vol;
            vol.name = require_string(v, "name", "Pod.spec.volumes");
            if (!v.contains("hostPath")) throw MissingField("Pod.spec.volumes.hostPath");
            vol.hostPath = require_string(v["hostPath"], "path", "Pod.spec.volumes.hostPath");
            warn_unknown(v["hostPath"], {"path"}, "Pod.spec.volumes.hostPath", warnings);
            warn_unknown(v, {"name", "hostPath"}, "Pod.spec.volumes", warnings);
            pod.volumes.push_back(vol);
        }
    }
    if (spec.contains("activeDeadlineSeconds"))
        pod.activeDeadlineSeconds = spec["activeDeadlineSeconds"].get<std::int64_t>();
    warn_unknown(spec,
                 {"containers", "restartPolicy", "nodeName", "volumes",
                  "activeDeadlineSeconds"},
                 "Pod.spec", warnings);
    if (doc.contains("status")) {
        const Json& st = doc["status"];
        if (st.contains("phase")) pod.status.phase = pod_phase_from_string(scalar_to_string(st["phase"]));
        if (st.contains("reason")) pod.status.reason = scalar_to_string(st["reason"]);
        if (st.contains("podIP")) pod.status.podIP = scalar_to_string(st["podIP"]);
        if (st.contains("exitCode")) pod.status.exitCode = st["exitCode"].get<int>();
        warn_unknown(st, {"phase", "reason", "podIP", "exitCode"}, "Pod.status", warnings);
    }
    warn_unknown(doc, {"apiVersion", "kind", "metadata", "spec", "status"}, "Pod", warnings);
    return pod;
}

ServiceType service_type_from_string(const std::string& s) {
    if (s == "ClusterIP") return ServiceType::ClusterIP;
    if (s == "NodePort") return ServiceType::NodePort;
    if (s == "LoadBalancer") return ServiceType::LoadBalancer;
    throw MissingField("Service.spec.type: unsupported value \"" + s + "\"");
}

ServiceResource service_from_json(const Json& doc, std::vector<std::string>& warnings) {
    ServiceResource svc;
    svc.meta = meta_from_json(doc, "Service", warnings);
    if (!doc.contains("spec")) throw MissingField("Service.spec");
    const Json& spec = doc["spec"];
    if (spec.contains("selector")) svc.selector = string_map(spec["selector"]);
    if (spec.contains("ports")) {
        for (const auto& p : spec["ports"]) {
            ServicePort port;
            if (p.contains("name")) port.name = scalar_to_string(p["name"]);
            if (!p.contains("port")) throw MissingField("Service.spec.ports.port");
            port.port = p["port"].get<int>();
            port.targetPort =
                p.contains("targetPort") ? p["targetPort"].get<int>() : port.port;
            warn_unknown(p, {"name", "port", "targetPort"}, "Service.spec.ports", warnings);
            svc.ports.push_back(port);
        }
    }
    if (spec.contains("clusterIP")) svc.clusterIP = scalar_to_string(spec["clusterIP"]);
    if (spec.contains("type")) svc.type = service_type_from_string(scalar_to_string(spec["type"]));
    warn_unknown(spec, {"selector", "ports", "clusterIP", "type"}, "Service.spec", warnings);
    warn_unknown(doc, {"apiVersion", "kind", "metadata", "spec"}, "Service", warnings);
    return svc;
}

StepPhase step_phase_from_string(const std::string& s) {
    if (s == "Waiting") return StepPhase::Waiting;
    if (s == "Pending") return StepPhase::Pending;
    if (s == "Running") return StepPhase::Running;
    if (s == "Succeeded") return StepPhase::Succeeded;
    if (s == "Failed") return StepPhase::Failed;
    if (s == "Skipped") return StepPhase::Skipped;
    throw MissingField("step phase: unsupported value \"" + s + "\"");
}

WorkflowPhase workflow_phase_from_string(const std::string& s) {
    if (s == "Pending") return WorkflowPhase::Pending;
    if (s == "Running") return WorkflowPhase::Running;
    if (s == "Succeeded") return WorkflowPhase::Succeeded;
    if (s == "Failed") return WorkflowPhase::Failed;
    throw MissingField("workflow phase: unsupported value \"" + s + "\"");
}

WorkflowResource workflow_from_json(const Json& doc, std::vector<std::string>& warnings) {
    WorkflowResource wf;
    wf.meta = meta_from_json(doc, "Workflow", warnings);
    if (!doc.contains("spec")) throw MissingField("Workflow.spec");
    const Json& spec = doc["spec"];
    wf.entrypoint = require_string(spec, "entrypoint", "Workflow.spec");
    if (!spec.contains("templates") || !spec["templates"].is_array())
        throw MissingField("Workflow.spec.templates");
    for (const auto& t : spec["templates"]) {
        WorkflowTemplate tmpl;
        tmpl.name = require_string(t, "name", "Workflow.spec.templates");
        const std::string path = "Workflow.spec.templates[" + tmpl.name + "]";
        if (t.contains("dag")) {
            std::vector<DagTask> tasks;
            if (!t["dag"].contains("tasks")) throw MissingField(path + ".dag.tasks");
            for (const auto& task : t["dag"]["tasks"]) {
                DagTask dt;
                dt.name = require_string(task, "name", path + ".dag.tasks");
                dt.templateRef = require_string(task, "template", path + ".dag.tasks");
                if (task.contains("dependencies"))
                    dt.dependencies = string_list(task["dependencies"], path + ".dependencies");
                if (task.contains("arguments") && task["arguments"].contains("parameters")) {
                    for (const auto& p : task["arguments"]["parameters"]) {
                        dt.parameters.push_back(
                            {require_string(p, "name", path + ".parameters"),
                             p.contains("value") ? scalar_to_string(p["value"]) : ""});
                        warn_unknown(p, {"name", "value"}, path + ".parameters", warnings);
                    }
                    warn_unknown(task["arguments"], {"parameters"}, path + ".arguments",
                                 warnings);
                }
                if (task.contains("withItems"))
                    dt.withItems = string_list(task["withItems"], path + ".withItems");
                warn_unknown(task,
                             {"name", "template", "dependencies", "arguments", "withItems"},
                             path + ".dag.tasks", warnings);
                tasks.push_back(std::move(dt));
            }
            warn_unknown(t["dag"], {"tasks"}, path + ".dag", warnings);
            tmpl.dag = std::move(tasks);
        }
        if (t.contains("container")) {
            PodTemplate pt;
            if (t.contains("metadata") && t["metadata"].contains("annotations"))
                pt.annotations = string_map(t["metadata"]["annotations"]);
            if (t.contains("inputs") && t["inputs"].contains("parameters")) {
                for (const auto& p : t["inputs"]["parameters"])
                    pt.inputParameters.push_back(require_string(p, "name", path + ".inputs"));
                warn_unknown(t["inputs"], {"parameters"}, path + ".inputs", warnings);
            }
            pt.container = container_from_json(t["container"], path + ".container", warnings);
            if (pt.container.name.empty()) pt.container.name = "main";
            tmpl.pod = std::move(pt);
        }
        if (!tmpl.dag && !tmpl.pod)
            throw MissingField(path + ": template needs either dag or container");
        warn_unknown(t, {"name", "dag", "container", "metadata", "inputs"}, path, warnings);
        wf.templates.push_back(std::move(tmpl));
    }
    warn_unknown(spec, {"entrypoint", "templates"}, "Workflow.spec", warnings);
    if (doc.contains("status")) {
        const Json& st = doc["status"];
        if (st.contains("phase"))
            wf.status.phase = workflow_phase_from_string(scalar_to_string(st["phase"]));
        if (st.contains("message")) wf.status.message = scalar_to_string(st["message"]);
        if (st.contains("steps")) {
            for (const auto& s : st["steps"]) {
                StepRecord rec;
                rec.task = scalar_to_string(s["task"]);
                rec.stepName = scalar_to_string(s["stepName"]);
                rec.podName = s.contains("podName") ? scalar_to_string(s["podName"]) : "";
                rec.phase = step_phase_from_string(scalar_to_string(s["phase"]));
                wf.status.steps.push_back(std::move(rec));
            }
        }
        warn_unknown(st, {"phase", "message", "steps"}, "Workflow.status", warnings);
    }
    warn_unknown(doc, {"apiVersion", "kind", "metadata", "spec", "status"}, "Workflow",
                 warnings);
    return wf;
}

NodeResource node_from_json(const Json& doc, std::vector<std::string>& warnings) {
    NodeResource node;
    node.name = require_string(doc["metadata"], "name", "Node.metadata");
    node.cpus = doc["capacity"]["cpus"].get<int>();
    node.memMiB = doc["capacity"]["memMiB"].get<std::int64_t>();
    warn_unknown(doc, {"apiVersion", "kind", "metadata", "capacity"}, "Node", warnings);
    return node;
}

}  // namespace

std::string kind_of(const Resource& r) {
    switch (r.index()) {
        case 0: return "Pod";
        case 1: return "Service";
        case 2: return "Workflow";
        default: return "Node";
    }
}

const ObjectMeta* meta_of(const Resource& r) {
    if (const auto* p = std::get_if<PodResource>(&r)) return &p->meta;
    if (const auto* s = std::get_if<ServiceResource>(&r)) return &s->meta;
    if (const auto* w = std::get_if<WorkflowResource>(&r)) return &w->meta;
    return nullptr;
}

std::string namespace_of(const Resource& r) {
    const ObjectMeta* m = meta_of(r);
    return m ? m->ns : "";
}

std::string name_of(const Resource& r) {
    if (const auto* n = std::get_if<NodeResource>(&r)) return n->name;
    return meta_of(r)->name;
}

const char* to_string(PodPhase p) {
    switch (p) {
        case PodPhase::Pending: return "Pending";
        case PodPhase::Running: return "Running";
        case PodPhase::Succeeded: return "Succeeded";
        default: return "Failed";
    }
}

const char* to_string(ServiceType t) {
    switch (t) {
        case ServiceType::ClusterIP: return "ClusterIP";
        case ServiceType::NodePort: return "NodePort";
        default: return "LoadBalancer";
    }
}

const char* to_string(RestartPolicy p) {
    return p == RestartPolicy::Never ? "Never" : "OnFailure";
}

const char* to_string(WorkflowPhase p) {
    switch (p) {
        case WorkflowPhase::Pending: return "Pending";
        case WorkflowPhase::Running: return "Running";
        case WorkflowPhase::Succeeded: return "Succeeded";
        default: return "Failed";
    }
}

const char* to_string(StepPhase p) {
    switch (p) {
        case StepPhase::Waiting: return "Waiting";
        case StepPhase::Pending: return "Pending";
        case StepPhase::Running: return "Running";
        case StepPhase::Succeeded: return "Succeeded";
        case StepPhase::Failed: return "Failed";
        default: return "Skipped";
    }
}

Json to_json(const PodResource& p) {
    Json doc;
    doc["kind"] = "Pod";
    doc["metadata"] = meta_to_json(p.meta);
    Json spec;
    Json containers = Json::array();
    for (const auto& c : p.containers) containers.push_back(container_to_json(c));
    spec["containers"] = containers;
    spec["restartPolicy"] = to_string(p.restartPolicy);
    if (!p.nodeName.empty()) spec["nodeName"] = p.nodeName;
    if (!p.volumes.empty()) {
        Json volumes = Json::array();
        for (const auto& v : p.volumes)
            volumes.push_back({{"name", v.name}, {"hostPath", {{"path", v.hostPath}}}});
        spec["volumes"] = volumes;
    }
    if (p.activeDeadlineSeconds) spec["activeDeadlineSeconds"] = *p.activeDeadlineSeconds;
    doc["spec"] = spec;
    Json status;
    status["phase"] = to_string(p.status.phase);
    if (!p.status.reason.empty()) status["reason"] = p.status.reason;
    if (!p.status.podIP.empty()) status["podIP"] = p.status.podIP;
    if (p.status.exitCode) status["exitCode"] = *p.status.exitCode;
    doc["status"] = status;
    return doc;
}

Json to_json(const ServiceResource& s) {
    Json doc;
    doc["kind"] = "Service";
    doc["metadata"] = meta_to_json(s.meta);
    Json spec;
    if (!s.selector.empty()) spec["selector"] = map_to_json(s.selector);
    if (!s.ports.empty()) {
        Json ports = Json::array();
        for (const auto& p : s.ports) {
            Json port;
            if (!p.name.empty()) port["name"] = p.name;
            port["port"] = p.port;
            port["targetPort"] = p.targetPort;
            ports.push_back(port);
        }
        spec["ports"] = ports;
    }
    if (s.clusterIP) spec["clusterIP"] = *s.clusterIP;
    spec["type"] = to_string(s.type);
    doc["spec"] = spec;
    return doc;
}

Json to_json(const WorkflowResource& w) {
    Json doc;
    doc["kind"] = "Workflow";
    doc["metadata"] = meta_to_json(w.meta);
    Json spec;
    spec["entrypoint"] = w.entrypoint;
    Json templates = Json::array();
    for (const auto& t : w.templates) {
        Json tmpl;
        tmpl["name"] = t.name;
        if (t.dag) {
            Json tasks = Json::array();
            for (const auto& task : *t.dag) {
                Json jt;
                jt["name"] = task.name;
                jt["template"] = task.templateRef;
                if (!task.dependencies.empty()) jt["dependencies"] = task.dependencies;
                if (!task.parameters.empty()) {
                    Json params = Json::array();
                    for (const auto& p : task.parameters)
                        params.push_back({{"name", p.name}, {"value", p.value}});
                    jt["arguments"] = {{"parameters", params}};
                }
                if (task.withItems) jt["withItems"] = *task.withItems;
                tasks.push_back(jt);
            }
            tmpl["dag"] = {{"tasks", tasks}};
        }
        if (t.pod) {
            if (!t.pod->annotations.empty())
                tmpl["metadata"] = {{"annotations", map_to_json(t.pod->annotations)}};
            if (!t.pod->inputParameters.empty()) {
                Json params = Json::array();
                for (const auto& p : t.pod->inputParameters)
                    params.push_back({{"name", p}});
                tmpl["inputs"] = {{"parameters", params}};
            }
            tmpl["container"] = container_to_json(t.pod->container);
        }
        templates.push_back(tmpl);
    }
    spec["templates"] = templates;
    doc["spec"] = spec;
    Json status;
    status["phase"] = to_string(w.status.phase);
    if (!w.status.message.empty()) status["message"] = w.status.message;
    if (!w.status.steps.empty()) {
        Json steps = Json::array();
        for (const auto& s : w.status.steps) {
            Json js;
            js["task"] = s.task;
            js["stepName"] = s.stepName;
            if (!s.podName.empty()) js["podName"] = s.podName;
            js["phase"] = to_string(s.phase);
            steps.push_back(js);
        }
        status["steps"] = steps;
    }
    doc["status"] = status;
    return doc;
}

Json to_json(const NodeResource& n) {
    Json doc;
    doc["kind"] = "Node";
    doc["metadata"] = {{"name", n.name}};
    doc["capacity"] = {{"cpus", n.cpus}, {"memMiB", n.memMiB}};
    return doc;
}

Json to_json(const Resource& r) {
    return std::visit([](const auto& v) { return to_json(v); }, r);
}

Resource resource_from_json(const std::string& kind, const Json& doc,
                            std::vector<std::string>& warnings) {
    if (kind == "Pod") return pod_from_json(doc, warnings);
    if (kind == "Service") return service_from_json(doc, warnings);
    if (kind == "Workflow") return workflow_from_json(doc, warnings);
    if (kind == "Node") return node_from_json(doc, warnings);
    throw UnsupportedKind(kind);
}

Json pod_spec_fingerprint(const PodResource& p) {
    Json doc = to_json(p);
    doc.erase("status");
    return doc;
}

}  // namespace hpk
