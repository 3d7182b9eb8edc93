#include "hpk/manifest.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <yaml-cpp/yaml.h>

#include "hpk/errors.hpp"

namespace hpk {

namespace {

Json yaml_to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
            return nullptr;
        case YAML::NodeType::Scalar: {
            // Quoted scalars (tag "!") stay strings; plain scalars get the
            // usual YAML type resolution.
            const std::string& s = node.Scalar();
            if (node.Tag() != "!") {
                if (s == "null" || s == "~" || s.empty()) return nullptr;
                if (s == "true") return true;
                if (s == "false") return false;
                try {
                    std::size_t pos = 0;
                    long long v = std::stoll(s, &pos);
                    if (pos == s.size()) return v;
                } catch (const std::exception&) {
                }
                try {
                    std::size_t pos = 0;
                    double v = std::stod(s, &pos);
                    if (pos == s.size()) return v;
                } catch (const std::exception&) {
                }
            }
            return s;
        }
        case YAML::NodeType::Sequence: {
            Json arr = Json::array();
            for (const auto& item : node) arr.push_back(yaml_to_json(item));
            return arr;
        }
        case YAML::NodeType::Map: {
            Json obj = Json::object();
            for (const auto& kv : node)
                obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
            return obj;
        }
        default:
            return nullptr;
    }
}

}  // namespace

ManifestResult parse_manifest(const std::string& text) {
    std::vector<YAML::Node> docs;
    try {
        docs = YAML::LoadAll(text);
    } catch (const YAML::Exception& e) {
        throw MalformedYaml(e.what());
    }

    ManifestResult result;
    for (const auto& doc : docs) {
        if (doc.IsNull() || !doc.IsDefined()) continue;
        ParsedDocument parsed;
        try {
            Json j = yaml_to_json(doc);
            if (!j.is_object()) throw MissingField("document is not a mapping");
            if (!j.contains("kind")) throw MissingField("kind");
            const std::string kind = j["kind"].get<std::string>();
            parsed.resource = resource_from_json(kind, j, result.warnings);
        } catch (const Error& e) {
            parsed.error = e.what();
        }
        result.documents.push_back(std::move(parsed));
    }
    return result;
}

std::string serialize_resource(const Resource& r) {
    return to_json(r).dump(2) + "\n";
}

std::vector<std::string> validate_pod(const PodResource& pod) {
    std::vector<std::string> violations;
    if (pod.meta.name.empty()) violations.push_back("metadata.name is empty");
    if (pod.containers.empty()) violations.push_back("pod has no containers");

    std::set<std::string> names;
    for (const auto& c : pod.containers) {
        if (c.name.empty()) violations.push_back("container with empty name");
        if (!names.insert(c.name).second)
            violations.push_back("duplicate container name \"" + c.name + "\"");
        if (c.image.empty())
            violations.push_back("container \"" + c.name + "\" has empty image");
        const auto& r = c.resources;
        if (r.cpuRequest && r.cpuLimit && r.cpuRequest->canonical > r.cpuLimit->canonical)
            violations.push_back("container \"" + c.name + "\": cpu request exceeds limit");
        if (r.memoryRequest && r.memoryLimit &&
            r.memoryRequest->canonical > r.memoryLimit->canonical)
            violations.push_back("container \"" + c.name + "\": memory request exceeds limit");
    }

    std::set<std::string> declared;
    for (const auto& v : pod.volumes) {
        if (!declared.insert(v.name).second)
            violations.push_back("duplicate volume name \"" + v.name + "\"");
        if (v.hostPath.empty() || v.hostPath[0] != '/')
            violations.push_back("volume \"" + v.name + "\": hostPath must be absolute");
    }
    for (const auto& c : pod.containers) {
        for (const auto& m : c.volumeMounts) {
            if (!declared.contains(m.volumeName))
                violations.push_back("container \"" + c.name +
                                     "\" mounts undeclared volume \"" + m.volumeName + "\"");
        }
    }

    if (pod.activeDeadlineSeconds && *pod.activeDeadlineSeconds <= 0)
        violations.push_back("activeDeadlineSeconds must be positive");
    return violations;
}

std::vector<std::string> validate_workflow(const WorkflowResource& wf) {
    std::vector<std::string> violations;
    std::map<std::string, const WorkflowTemplate*> byName;
    for (const auto& t : wf.templates) {
        if (!byName.emplace(t.name, &t).second)
            violations.push_back("duplicate template \"" + t.name + "\"");
    }
    if (!byName.contains(wf.entrypoint))
        violations.push_back("entrypoint \"" + wf.entrypoint + "\" names no template");

    for (const auto& t : wf.templates) {
        if (!t.dag) continue;
        std::map<std::string, const DagTask*> tasks;
        for (const auto& task : *t.dag) {
            if (!tasks.emplace(task.name, &task).second)
                violations.push_back("duplicate task \"" + task.name + "\"");
            if (!byName.contains(task.templateRef))
                violations.push_back("task \"" + task.name + "\" references missing template \"" +
                                     task.templateRef + "\"");
        }
        for (const auto& task : *t.dag) {
            for (const auto& dep : task.dependencies) {
                if (dep == task.name)
                    violations.push_back("task \"" + task.name + "\" depends on itself");
                else if (!tasks.contains(dep))
                    violations.push_back("task \"" + task.name + "\" depends on unknown task \"" +
                                         dep + "\"");
            }
        }
        // Cycle check: repeatedly peel tasks whose dependencies are all peeled.
        std::set<std::string> peeled;
        bool progress = true;
        while (progress) {
            progress = false;
            for (const auto& task : *t.dag) {
                if (peeled.contains(task.name)) continue;
                bool ready = true;
                for (const auto& dep : task.dependencies)
                    if (!peeled.contains(dep) && tasks.contains(dep)) ready = false;
                if (ready) {
                    peeled.insert(task.name);
                    progress = true;
                }
            }
        }
        if (peeled.size() != tasks.size())
            violations.push_back("cycle detected in dag template \"" + t.name + "\"");
    }
    return violations;
}

}  // namespace hpk
