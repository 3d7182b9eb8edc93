#include "hpk/store.hpp"

#include <algorithm>

#include "hpk/errors.hpp"
#include "hpk/manifest.hpp"

namespace hpk {

ObjectKey key_of(const Resource& r) {
    return {kind_of(r), namespace_of(r), name_of(r)};
}

const char* to_string(WatchEventType t) {
    switch (t) {
        case WatchEventType::Added: return "ADDED";
        case WatchEventType::Modified: return "MODIFIED";
        default: return "DELETED";
    }
}

AdmissionOutcome admit_service(const ServiceResource& svc) {
    AdmissionOutcome out;
    out.object = svc;
    if (svc.type == ServiceType::NodePort || svc.type == ServiceType::LoadBalancer) {
        out.verdict = AdmissionVerdict::Rejected;
        out.reason = std::string("service type ") + to_string(svc.type) +
                     " requires physical node resources and is disabled";
        return out;
    }
    if (!svc.clusterIP || svc.clusterIP->empty()) {
        out.verdict = AdmissionVerdict::Mutated;
        out.object.clusterIP = "None";
        return out;
    }
    if (*svc.clusterIP != "None") {
        out.verdict = AdmissionVerdict::Rejected;
        out.reason = "explicit clusterIP \"" + *svc.clusterIP +
                     "\" cannot be honored; ClusterIP services are disabled";
        return out;
    }
    out.verdict = AdmissionVerdict::Allowed;
    return out;
}

void Store::record(WatchEventType type, const StoredObject& obj) {
    log_.push_back(WatchEvent{type, obj});
}

Store::PutResult Store::put(Resource resource) {
    PutResult result;
    if (auto* svc = std::get_if<ServiceResource>(&resource)) {
        AdmissionOutcome outcome = admit_service(*svc);
        if (outcome.verdict == AdmissionVerdict::Rejected)
            throw AdmissionRejected(outcome.reason);
        result.verdict = outcome.verdict;
        *svc = outcome.object;
    } else if (const auto* pod = std::get_if<PodResource>(&resource)) {
        auto violations = validate_pod(*pod);
        if (!violations.empty()) {
            std::string msg = "pod " + pod->meta.ns + "/" + pod->meta.name + ":";
            for (const auto& v : violations) msg += " " + v + ";";
            throw ValidationFailed(msg);
        }
    }

    const ObjectKey key = key_of(resource);
    auto it = objects_.find(key);
    if (it != objects_.end() && to_json(it->second.body) == to_json(resource)) {
        result.version = it->second.resourceVersion;
        result.changed = false;
        return result;
    }

    StoredObject obj{key, ++nextVersion_, std::move(resource)};
    const bool existed = it != objects_.end();
    objects_[key] = obj;
    record(existed ? WatchEventType::Modified : WatchEventType::Added, obj);
    result.version = obj.resourceVersion;
    return result;
}

bool Store::erase(const ObjectKey& key) {
    auto it = objects_.find(key);
    if (it == objects_.end()) return false;
    StoredObject last = it->second;
    objects_.erase(it);
    last.resourceVersion = ++nextVersion_;
    record(WatchEventType::Deleted, last);
    return true;
}

std::optional<StoredObject> Store::get(const ObjectKey& key) const {
    auto it = objects_.find(key);
    if (it == objects_.end()) return std::nullopt;
    return it->second;
}

std::vector<StoredObject> Store::list(const std::string& kind) const {
    std::vector<StoredObject> out;
    for (const auto& [key, obj] : objects_)
        if (key.kind == kind) out.push_back(obj);
    return out;
}

std::vector<std::pair<ObjectKey, std::string>> Store::bind_pending_pods() {
    std::vector<std::pair<ObjectKey, std::string>> bound;
    for (const auto& obj : list("Pod")) {
        const auto& pod = std::get<PodResource>(obj.body);
        if (!pod.nodeName.empty()) continue;
        PodResource updated = pod;
        updated.nodeName = kVirtualNodeName;
        put(updated);
        bound.emplace_back(obj.key, kVirtualNodeName);
    }
    return bound;
}

std::vector<WatchEvent> Store::events_since(std::uint64_t fromVersion,
                                            const std::string& kindPrefix) const {
    std::vector<WatchEvent> out;
    for (const auto& ev : log_) {
        if (ev.object.resourceVersion <= fromVersion) continue;
        if (!ev.object.key.kind.starts_with(kindPrefix)) continue;
        out.push_back(ev);
    }
    return out;
}

Json Store::dump() const {
    Json out = Json::object();
    std::map<std::string, std::vector<const StoredObject*>> byKind;
    for (const auto& [key, obj] : objects_) byKind[key.kind].push_back(&obj);
    for (const auto& [kind, objs] : byKind) {
        Json list = Json::array();
        for (const StoredObject* obj : objs) {
            Json entry;
            entry["resourceVersion"] = obj->resourceVersion;
            entry["object"] = to_json(obj->body);
            list.push_back(entry);
        }
        out[kind] = list;
    }
    return out;
}

Json Store::snapshot() const {
    Json out;
    out["nextVersion"] = nextVersion_;
    Json objs = Json::array();
    for (const auto& [key, obj] : objects_) {
        Json entry;
        entry["resourceVersion"] = obj.resourceVersion;
        entry["object"] = to_json(obj.body);
        objs.push_back(entry);
    }
    out["objects"] = objs;
    Json log = Json::array();
    for (const auto& ev : log_) {
        Json entry;
        entry["type"] = to_string(ev.type);
        entry["resourceVersion"] = ev.object.resourceVersion;
        entry["object"] = to_json(ev.object.body);
        log.push_back(entry);
    }
    out["log"] = log;
    return out;
}

void Store::restore(const Json& state) {
    objects_.clear();
    log_.clear();
    nextVersion_ = state["nextVersion"].get<std::uint64_t>();
    std::vector<std::string> warnings;
    for (const auto& entry : state["objects"]) {
        StoredObject obj;
        obj.resourceVersion = entry["resourceVersion"].get<std::uint64_t>();
        obj.body = resource_from_json(entry["object"]["kind"].get<std::string>(),
                                      entry["object"], warnings);
        obj.key = key_of(obj.body);
        objects_[obj.key] = obj;
    }
    for (const auto& entry : state["log"]) {
        WatchEvent ev;
        const std::string type = entry["type"].get<std::string>();
        ev.type = type == "ADDED"     ? WatchEventType::Added
                  : type == "MODIFIED" ? WatchEventType::Modified
                                       : WatchEventType::Deleted;
        ev.object.resourceVersion = entry["resourceVersion"].get<std::uint64_t>();
        ev.object.body = resource_from_json(entry["object"]["kind"].get<std::string>(),
                                            entry["object"], warnings);
        ev.object.key = key_of(ev.object.body);
        log_.push_back(std::move(ev));
    }
}

std::optional<WatchEvent> Watch::next() {
    for (const auto& ev : store_->event_log()) {
        if (ev.object.resourceVersion <= after_) continue;
        if (!ev.object.key.kind.starts_with(kindPrefix_)) continue;
        after_ = ev.object.resourceVersion;
        return ev;
    }
    return std::nullopt;
}

}  // namespace hpk
