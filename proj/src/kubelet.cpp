#include "hpk/kubelet.hpp"

#include "hpk/errors.hpp"
#include "hpk/translator.hpp"

namespace hpk {

Kubelet::Kubelet(Store& store, SlurmSimulator& sim, Ipam& ipam, BehaviorLookup behaviors)
    : store_(store), sim_(sim), ipam_(ipam), behaviors_(std::move(behaviors)) {}

NodeResource Kubelet::register_node() {
    if (sim_.nodes().empty()) throw EmptyCluster("cluster config has no nodes");
    NodeResource node{kVirtualNodeName, sim_.total_cpus(), sim_.total_memMiB()};
    store_.put(node);
    return node;
}

std::pair<PodPhase, std::string> Kubelet::sync_status(JobState state, int exitCode) {
    switch (state) {
        case JobState::Pending: return {PodPhase::Pending, ""};
        case JobState::Running: return {PodPhase::Running, ""};
        case JobState::Completed: return {PodPhase::Succeeded, ""};
        case JobState::Failed:
            return {PodPhase::Failed, "Error"};
        case JobState::Timeout: return {PodPhase::Failed, "DeadlineExceeded"};
        case JobState::Cancelled: return {PodPhase::Failed, "Cancelled"};
    }
    return {PodPhase::Failed, "Error"};
}

void Kubelet::log(const std::string& line) { actionLog_.push_back(line); }

void Kubelet::write_status(const ObjectKey& key, PodPhase phase, const std::string& reason,
                           const std::string& podIP, std::optional<int> exitCode) {
    auto stored = store_.get(key);
    if (!stored) return;
    PodResource pod = std::get<PodResource>(stored->body);
    pod.status.phase = phase;
    pod.status.reason = reason;
    pod.status.podIP = podIP;
    pod.status.exitCode = exitCode;
    store_.put(pod);
}

void Kubelet::submit_pod(const PodResource& pod, PodJobBinding& binding,
                         std::vector<ReconcileAction>* actions) {
    const std::string script = render_script(pod, binding.podIP);
    const ScriptDemand demand = parse_script_demand(script);
    const JobBehavior behavior = behaviors_(pod, binding.restartCount);
    binding.jobId = sim_.submit(
        script, JobDemand{demand.cpus, demand.memMiB, demand.timeLimitTicks}, behavior);
    binding.lastObservedJobState = JobState::Pending;
    byJob_[binding.jobId] = binding.podKey;
    log("SUBMIT " + binding.podKey.str() + " job=" + std::to_string(binding.jobId) +
        " attempt=" + std::to_string(binding.restartCount));
    if (actions) actions->push_back({ActionType::Submit, binding.podKey, binding.jobId});
}

std::vector<ReconcileAction> Kubelet::reconcile(const WatchEvent& event) {
    std::vector<ReconcileAction> actions;
    if (event.object.key.kind != "Pod") return actions;
    const ObjectKey& key = event.object.key;

    if (event.type == WatchEventType::Deleted) {
        auto it = bindings_.find(key);
        if (it == bindings_.end()) return actions;
        PodJobBinding binding = it->second;
        if (!is_terminal(sim_.query(binding.jobId).state)) {
            sim_.cancel(binding.jobId);
            log("CANCEL " + key.str() + " job=" + std::to_string(binding.jobId));
            actions.push_back({ActionType::Cancel, key, binding.jobId});
        }
        if (ipam_.address_of(key.str())) ipam_.release(key.str());
        byJob_.erase(binding.jobId);
        bindings_.erase(it);
        return actions;
    }

    const auto& pod = std::get<PodResource>(event.object.body);
    if (pod.nodeName != kVirtualNodeName) return actions;

    auto it = bindings_.find(key);
    if (it != bindings_.end()) {
        const std::string fingerprint = pod_spec_fingerprint(pod).dump();
        if (fingerprint != it->second.specFingerprint)
            log("IGNORE-SPEC-CHANGE " + key.str() + " (job already submitted)");
        return actions;  // status-only updates and live-job spec edits: no action
    }

    // Terminal pods without a binding (e.g. restored state or a prior
    // unschedulable verdict) are not resubmitted.
    if (pod.status.phase == PodPhase::Succeeded || pod.status.phase == PodPhase::Failed)
        return actions;

    PodJobBinding binding;
    binding.podKey = key;
    binding.specFingerprint = pod_spec_fingerprint(pod).dump();
    binding.podIP = ipam_.allocate_anywhere(key.str());
    try {
        submit_pod(pod, binding, &actions);
    } catch (const NeverSchedulable& e) {
        ipam_.release(key.str());
        log("UNSCHEDULABLE " + key.str());
        write_status(key, PodPhase::Failed, "Unschedulable", "", std::nullopt);
        return actions;
    }
    bindings_[key] = binding;
    return actions;
}

bool Kubelet::pump() {
    bool any = false;
    for (;;) {
        auto events = store_.events_since(watchAfter_, "Pod");
        if (events.empty()) break;
        for (const auto& ev : events) {
            watchAfter_ = ev.object.resourceVersion;
            reconcile(ev);
            any = true;
        }
    }
    return any;
}

void Kubelet::process_sim_events(std::span<const SimEvent> events) {
    for (const auto& ev : events) {
        auto jobIt = byJob_.find(ev.jobId);
        if (jobIt == byJob_.end()) continue;
        const ObjectKey key = jobIt->second;
        auto it = bindings_.find(key);
        if (it == bindings_.end() || it->second.jobId != ev.jobId) continue;
        PodJobBinding& binding = it->second;
        binding.lastObservedJobState = ev.to;

        if (ev.to == JobState::Running) {
            write_status(key, PodPhase::Running, "", binding.podIP, std::nullopt);
            continue;
        }
        if (!is_terminal(ev.to)) continue;

        const SlurmJobRecord job = sim_.query(ev.jobId);
        auto stored = store_.get(key);
        if (!stored) continue;  // pod deleted; nothing to update
        const auto& pod = std::get<PodResource>(stored->body);

        if (ev.to == JobState::Failed && pod.restartPolicy == RestartPolicy::OnFailure &&
            binding.restartCount < kRestartCap) {
            binding.restartCount += 1;
            byJob_.erase(ev.jobId);
            write_status(key, PodPhase::Pending, "Restarting", "", std::nullopt);
            submit_pod(pod, binding, nullptr);
            continue;
        }

        auto [phase, reason] = sync_status(ev.to, job.behavior.exitCode);
        const bool started = job.startTick >= 0;
        write_status(key, phase, reason, started ? binding.podIP : "",
                     ev.to == JobState::Failed ? std::optional<int>(job.behavior.exitCode)
                                               : std::nullopt);
    }
}

Json Kubelet::snapshot() const {
    Json out;
    out["watchAfter"] = watchAfter_;
    Json bindings = Json::array();
    for (const auto& [key, b] : bindings_) {
        bindings.push_back({{"kind", key.kind},
                            {"ns", key.ns},
                            {"name", key.name},
                            {"jobId", b.jobId},
                            {"lastState", to_string(b.lastObservedJobState)},
                            {"restartCount", b.restartCount},
                            {"podIP", b.podIP},
                            {"specFingerprint", b.specFingerprint}});
    }
    out["bindings"] = bindings;
    out["actionLog"] = actionLog_;
    return out;
}

void Kubelet::restore(const Json& state) {
    bindings_.clear();
    byJob_.clear();
    actionLog_.clear();
    watchAfter_ = state["watchAfter"].get<std::uint64_t>();
    for (const auto& b : state["bindings"]) {
        PodJobBinding binding;
        binding.podKey = {b["kind"].get<std::string>(), b["ns"].get<std::string>(),
                          b["name"].get<std::string>()};
        binding.jobId = b["jobId"].get<std::uint64_t>();
        const std::string last = b["lastState"].get<std::string>();
        for (JobState s : {JobState::Pending, JobState::Running, JobState::Completed,
                           JobState::Failed, JobState::Cancelled, JobState::Timeout})
            if (last == to_string(s)) binding.lastObservedJobState = s;
        binding.restartCount = b["restartCount"].get<int>();
        binding.podIP = b["podIP"].get<std::string>();
        binding.specFingerprint = b["specFingerprint"].get<std::string>();
        byJob_[binding.jobId] = binding.podKey;
        bindings_[binding.podKey] = std::move(binding);
    }
    for (const auto& line : state["actionLog"]) actionLog_.push_back(line.get<std::string>());
}

}  // namespace hpk
