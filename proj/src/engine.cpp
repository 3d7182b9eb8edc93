#include "hpk/engine.hpp"

#include <algorithm>

#include <yaml-cpp/yaml.h>

#include "hpk/errors.hpp"
#include "hpk/manifest.hpp"

namespace hpk {

bool glob_match(const std::string& pattern, const std::string& text) {
    // Iterative star-backtracking match; '*' spans any run including '/'.
    std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

EngineConfig load_engine_config(const std::string& yamlText, const std::string& baseDir) {
    YAML::Node root;
    try {
        root = YAML::Load(yamlText);
    } catch (const YAML::Exception& e) {
        throw MalformedYaml(e.what());
    }

    EngineConfig config;
    if (!root["clusterNodes"] || !root["clusterNodes"].IsSequence() ||
        root["clusterNodes"].size() == 0)
        throw MissingField("config.clusterNodes (need at least one node)");
    for (const auto& n : root["clusterNodes"]) {
        NodeConfig node;
        node.name = n["name"].as<std::string>();
        node.cpus = n["cpus"].as<int>();
        node.memMiB = n["memMiB"] ? n["memMiB"].as<std::int64_t>() : 0;
        config.clusterNodes.push_back(std::move(node));
    }

    YAML::Node behaviors = root["behaviors"];
    if (behaviors && behaviors.IsScalar()) {
        // Indirection through a sidecar behaviors file.
        const std::string path = baseDir.empty() ? behaviors.as<std::string>()
                                                 : baseDir + "/" + behaviors.as<std::string>();
        behaviors = YAML::LoadFile(path);
    }
    if (behaviors && behaviors.IsSequence()) {
        for (const auto& b : behaviors) {
            BehaviorRule rule;
            rule.pattern = b["pattern"].as<std::string>();
            if (b["runTicks"]) rule.runTicks = b["runTicks"].as<std::int64_t>();
            if (rule.runTicks < 1) throw MissingField("behaviors.runTicks must be >= 1");
            if (b["exitCode"]) {
                rule.exitCodes.clear();
                if (b["exitCode"].IsSequence()) {
                    for (const auto& code : b["exitCode"])
                        rule.exitCodes.push_back(code.as<int>());
                } else {
                    rule.exitCodes.push_back(b["exitCode"].as<int>());
                }
            }
            config.behaviors.push_back(std::move(rule));
        }
    }
    if (root["quiescenceLimit"])
        config.quiescenceLimit = root["quiescenceLimit"].as<std::int64_t>();
    return config;
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
    sim_ = std::make_unique<SlurmSimulator>(config_.clusterNodes);
    std::vector<std::string> nodeNames;
    for (const auto& n : config_.clusterNodes) nodeNames.push_back(n.name);
    ipam_ = std::make_unique<Ipam>(std::move(nodeNames));
    kubelet_ = std::make_unique<Kubelet>(
        store_, *sim_, *ipam_,
        [this](const PodResource& pod, int attempt) { return behavior_for(pod, attempt); });
    workflow_ = std::make_unique<WorkflowController>(store_);
    kubelet_->register_node();
}

JobBehavior Engine::behavior_for(const PodResource& pod, int attempt) const {
    const std::string target = pod.meta.ns + "/" + pod.meta.name;
    for (const auto& rule : config_.behaviors) {
        if (!glob_match(rule.pattern, target)) continue;
        JobBehavior behavior;
        behavior.runTicks = rule.runTicks;
        const std::size_t idx =
            std::min<std::size_t>(attempt, rule.exitCodes.size() - 1);
        behavior.exitCode = rule.exitCodes.empty() ? 0 : rule.exitCodes[idx];
        return behavior;
    }
    return JobBehavior{1, 0};
}

std::vector<ApplyVerdict> Engine::apply(const std::string& manifestText) {
    ManifestResult parsed = parse_manifest(manifestText);
    std::vector<ApplyVerdict> verdicts;
    for (const auto& doc : parsed.documents) {
        ApplyVerdict verdict;
        if (!doc.error.empty()) {
            verdict.key = "-";
            verdict.outcome = "rejected: " + doc.error;
            verdict.rejected = true;
            verdicts.push_back(std::move(verdict));
            continue;
        }
        const Resource& resource = *doc.resource;
        verdict.key = key_of(resource).str();
        const bool existed = store_.get(key_of(resource)).has_value();
        try {
            Store::PutResult result = store_.put(resource);
            if (!result.changed)
                verdict.outcome = "unchanged";
            else if (result.verdict == AdmissionVerdict::Mutated)
                verdict.outcome = std::string(existed ? "updated" : "created") +
                                  " (mutated: clusterIP=None)";
            else
                verdict.outcome = existed ? "updated" : "created";
        } catch (const Error& e) {
            verdict.outcome = std::string("rejected: ") + e.what();
            verdict.rejected = true;
        }
        verdicts.push_back(std::move(verdict));
    }
    settle();
    return verdicts;
}

bool Engine::erase(const std::string& kind, const std::string& ns, const std::string& name) {
    const bool removed = store_.erase({kind, ns, name});
    if (removed) settle();
    return removed;
}

void Engine::settle() {
    for (;;) {
        bool changed = !store_.bind_pending_pods().empty();
        if (kubelet_->pump()) changed = true;
        if (workflow_->pump()) changed = true;
        if (!changed) break;
    }
}

std::vector<SimEvent> Engine::simulate_until(std::int64_t tick) {
    settle();
    std::vector<SimEvent> all;
    while (sim_->now() < tick) {
        auto events = sim_->step(1);
        kubelet_->process_sim_events(events);
        settle();
        all.insert(all.end(), events.begin(), events.end());
    }
    return all;
}

bool Engine::quiescent() const {
    if (!sim_->quiescent()) return false;
    for (const auto& obj : store_.list("Workflow")) {
        const auto phase = std::get<WorkflowResource>(obj.body).status.phase;
        if (phase != WorkflowPhase::Succeeded && phase != WorkflowPhase::Failed)
            return false;
    }
    for (const auto& obj : store_.list("Pod")) {
        const auto phase = std::get<PodResource>(obj.body).status.phase;
        if (phase != PodPhase::Succeeded && phase != PodPhase::Failed) return false;
    }
    return true;
}

std::vector<SimEvent> Engine::simulate_to_quiescence() {
    settle();
    std::vector<SimEvent> all;
    const std::int64_t limit = sim_->now() + config_.quiescenceLimit;
    while (!quiescent()) {
        if (sim_->now() >= limit)
            throw NonQuiescent("no quiescence within " +
                               std::to_string(config_.quiescenceLimit) + " ticks");
        auto events = sim_->step(1);
        kubelet_->process_sim_events(events);
        settle();
        all.insert(all.end(), events.begin(), events.end());
    }
    return all;
}

std::string Engine::export_script(const std::string& ns, const std::string& podName) const {
    const ObjectKey key{"Pod", ns, podName};
    auto it = kubelet_->bindings().find(key);
    if (it == kubelet_->bindings().end())
        throw NotSubmitted("pod " + ns + "/" + podName + " has not been submitted");
    return sim_->query(it->second.jobId).script;
}

Json Engine::snapshot() const {
    Json out;
    out["store"] = store_.snapshot();
    out["sim"] = sim_->snapshot();
    out["ipam"] = ipam_->snapshot();
    out["kubelet"] = kubelet_->snapshot();
    return out;
}

void Engine::restore(const Json& state) {
    store_.restore(state["store"]);
    sim_->restore(state["sim"]);
    ipam_->restore(state["ipam"]);
    kubelet_->restore(state["kubelet"]);
}

}  // namespace hpk
