#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hpk/kubelet.hpp"
#include "hpk/model.hpp"
#include "hpk/network.hpp"
#include "hpk/slurm_sim.hpp"
#include "hpk/store.hpp"
#include "hpk/workflow.hpp"

namespace hpk {

// Pod name pattern -> scripted job outcome. Patterns are matched against
// "<namespace>/<name>" with '*' as a multi-character wildcard; first match
// wins. exitCodes are consumed per restart attempt, the last one repeating.
struct BehaviorRule {
    std::string pattern;
    std::int64_t runTicks = 1;
    std::vector<int> exitCodes{0};
};

struct EngineConfig {
    std::vector<NodeConfig> clusterNodes;
    std::vector<BehaviorRule> behaviors;
    std::int64_t quiescenceLimit = 10000;
};

EngineConfig load_engine_config(const std::string& yamlText,
                                const std::string& baseDir = "");

bool glob_match(const std::string& pattern, const std::string& text);

struct ApplyVerdict {
    std::string key;      // "kind/ns/name"
    std::string outcome;  // created | updated | unchanged | mutated... | rejected...
    bool rejected = false;
};

// Single-process engine: control plane, simulator, IPAM, kubelet, and
// workflow controller behind one logical event loop.
class Engine {
public:
    explicit Engine(EngineConfig config);

    std::vector<ApplyVerdict> apply(const std::string& manifestText);
    bool erase(const std::string& kind, const std::string& ns, const std::string& name);

    // Runs scheduler, kubelet, and workflow controller to fixpoint.
    void settle();

    // Advances the simulator one tick at a time, settling in between.
    std::vector<SimEvent> simulate_until(std::int64_t tick);
    // Throws NonQuiescent when the configured tick bound is exceeded.
    std::vector<SimEvent> simulate_to_quiescence();
    bool quiescent() const;

    std::string export_script(const std::string& ns, const std::string& podName) const;
    std::string trace_text() const { return sim_->trace_text(); }

    Store& store() { return store_; }
    const Store& store() const { return store_; }
    SlurmSimulator& simulator() { return *sim_; }
    Ipam& ipam() { return *ipam_; }
    Kubelet& kubelet() { return *kubelet_; }
    const EngineConfig& config() const { return config_; }

    JobBehavior behavior_for(const PodResource& pod, int attempt) const;

    Json snapshot() const;
    void restore(const Json& state);

private:
    EngineConfig config_;
    Store store_;
    std::unique_ptr<SlurmSimulator> sim_;
    std::unique_ptr<Ipam> ipam_;
    std::unique_ptr<Kubelet> kubelet_;
    std::unique_ptr<WorkflowController> workflow_;
};

}  // namespace hpk
