#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpk/model.hpp"

namespace hpk {

struct ObjectKey {
    std::string kind;
    std::string ns;
    std::string name;

    auto operator<=>(const ObjectKey&) const = default;
    std::string str() const { return kind + "/" + ns + "/" + name; }
};

ObjectKey key_of(const Resource& r);

struct StoredObject {
    ObjectKey key;
    std::uint64_t resourceVersion = 0;
    Resource body;
};

enum class WatchEventType { Added, Modified, Deleted };

const char* to_string(WatchEventType t);

struct WatchEvent {
    WatchEventType type = WatchEventType::Added;
    StoredObject object;  // snapshot; for Deleted, the last live state
};

enum class AdmissionVerdict { Allowed, Mutated, Rejected };

struct AdmissionOutcome {
    AdmissionVerdict verdict = AdmissionVerdict::Allowed;
    ServiceResource object;
    std::string reason;  // required when Rejected
};

// Disables every service construct that would need a virtual IP or host
// port: unset/empty clusterIP is rewritten to "None" (headless), while an
// explicit virtual IP, NodePort, or LoadBalancer is rejected outright.
AdmissionOutcome admit_service(const ServiceResource& svc);

inline constexpr const char* kVirtualNodeName = "hpk-node";

// Versioned, watchable object store with admission applied on every write.
// Single-writer: callers serialize all mutations externally.
class Store {
public:
    struct PutResult {
        std::uint64_t version = 0;
        AdmissionVerdict verdict = AdmissionVerdict::Allowed;
        bool changed = true;  // false when the write was a no-op
    };

    // Throws AdmissionRejected or ValidationFailed. A write whose body equals
    // the stored object is a no-op: no version bump, no event.
    PutResult put(Resource resource);

    // Returns false if the key was absent. Emits a Deleted event otherwise.
    bool erase(const ObjectKey& key);

    std::optional<StoredObject> get(const ObjectKey& key) const;
    std::vector<StoredObject> list(const std::string& kind) const;

    std::uint64_t currentVersion() const { return nextVersion_; }

    // Pass-through scheduler: every pod with an empty nodeName is bound to
    // the single virtual node. Returns the (podKey, nodeName) pairs bound.
    std::vector<std::pair<ObjectKey, std::string>> bind_pending_pods();

    // All events with resourceVersion > fromVersion whose kind starts with
    // kindPrefix ("" matches everything), in version order. History is
    // retained forever, so a cursor can always resume.
    std::vector<WatchEvent> events_since(std::uint64_t fromVersion,
                                         const std::string& kindPrefix = "") const;
    const std::vector<WatchEvent>& event_log() const { return log_; }

    // State dump: top-level map kind -> list of objects with resourceVersion,
    // keys in stable sorted order.
    Json dump() const;

    // Full persistence snapshot (objects + event log + version counter),
    // richer than dump(); restore() accepts exactly this shape.
    Json snapshot() const;
    void restore(const Json& state);

private:
    std::uint64_t nextVersion_ = 0;
    std::map<ObjectKey, StoredObject> objects_;
    std::vector<WatchEvent> log_;

    void record(WatchEventType type, const StoredObject& obj);
};

// Incremental cursor over a store's event log.
class Watch {
public:
    Watch(const Store& store, std::string kindPrefix, std::uint64_t fromVersion)
        : store_(&store), kindPrefix_(std::move(kindPrefix)), after_(fromVersion) {}

    std::optional<WatchEvent> next();
    std::uint64_t position() const { return after_; }
    void seek(std::uint64_t version) { after_ = version; }

private:
    const Store* store_;
    std::string kindPrefix_;
    std::uint64_t after_;
};

}  // namespace hpk
