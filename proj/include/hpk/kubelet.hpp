#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hpk/model.hpp"
#include "hpk/network.hpp"
#include "hpk/slurm_sim.hpp"
#include "hpk/store.hpp"

namespace hpk {

struct PodJobBinding {
    ObjectKey podKey;
    std::uint64_t jobId = 0;
    JobState lastObservedJobState = JobState::Pending;
    int restartCount = 0;
    std::string podIP;
    std::string specFingerprint;
    bool deleted = false;  // pod object gone; suppress further status writes
};

enum class ActionType { Submit, Cancel, None };

struct ReconcileAction {
    ActionType type = ActionType::None;
    ObjectKey podKey;
    std::uint64_t jobId = 0;
};

// Virtual-node reconciler: one consumer of the pod watch stream. Registers
// the single hpk-node, submits a Slurm job per bound pod, cancels on pod
// deletion, and maps Slurm job states back onto pod phases.
class Kubelet {
public:
    using BehaviorLookup =
        std::function<JobBehavior(const PodResource& pod, int attempt)>;

    Kubelet(Store& store, SlurmSimulator& sim, Ipam& ipam, BehaviorLookup behaviors);

    // Stores the Node object with capacity equal to the cluster totals.
    // Throws EmptyCluster when the simulator has no nodes.
    NodeResource register_node();

    std::vector<ReconcileAction> reconcile(const WatchEvent& event);

    // Consumes the pod watch stream to exhaustion. Returns true if anything
    // happened (used for fixpoint detection).
    bool pump();

    // Applies terminal/state-change simulator events to pod statuses,
    // including the OnFailure restart policy (capped at kRestartCap).
    void process_sim_events(std::span<const SimEvent> events);

    // Slurm state -> (pod phase, reason) mapping table.
    static std::pair<PodPhase, std::string> sync_status(JobState state, int exitCode);

    static constexpr int kRestartCap = 3;

    const std::map<ObjectKey, PodJobBinding>& bindings() const { return bindings_; }
    const std::vector<std::string>& action_log() const { return actionLog_; }

    Json snapshot() const;
    void restore(const Json& state);

private:
    Store& store_;
    SlurmSimulator& sim_;
    Ipam& ipam_;
    BehaviorLookup behaviors_;
    std::map<ObjectKey, PodJobBinding> bindings_;
    std::map<std::uint64_t, ObjectKey> byJob_;
    std::uint64_t watchAfter_ = 0;
    std::vector<std::string> actionLog_;

    void submit_pod(const PodResource& pod, PodJobBinding& binding,
                    std::vector<ReconcileAction>* actions);
    void write_status(const ObjectKey& key, PodPhase phase, const std::string& reason,
                      const std::string& podIP, std::optional<int> exitCode);
    void log(const std::string& line);
};

}  // namespace hpk
