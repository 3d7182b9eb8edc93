#include "hpk/slurm_sim.hpp"

#include <algorithm>

#include "hpk/errors.hpp"
#include "hpk/translator.hpp"

namespace hpk {

const char* to_string(JobState s) {
    switch (s) {
        case JobState::Pending: return "PENDING";
        case JobState::Running: return "RUNNING";
        case JobState::Completed: return "COMPLETED";
        case JobState::Failed: return "FAILED";
        case JobState::Cancelled: return "CANCELLED";
        default: return "TIMEOUT";
    }
}

bool is_terminal(JobState s) {
    return s != JobState::Pending && s != JobState::Running;
}

SlurmSimulator::SlurmSimulator(std::vector<NodeConfig> nodes)
    : config_(std::move(nodes)), load_(config_.size()) {}

std::uint64_t SlurmSimulator::submit(const std::string& script, JobDemand demand,
                                     JobBehavior behavior) {
    if (demand.cpus < 1) throw Error("demand.cpus must be >= 1");
    if (behavior.runTicks < 1) throw Error("behavior.runTicks must be >= 1");

    const ScriptDemand parsed = parse_script_demand(script);
    if (parsed.cpus != demand.cpus || parsed.memMiB != demand.memMiB)
        throw Error("script directives disagree with supplied demand (script: " +
                    std::to_string(parsed.cpus) + " cpus / " +
                    std::to_string(parsed.memMiB) + " MiB, supplied: " +
                    std::to_string(demand.cpus) + " / " + std::to_string(demand.memMiB) +
                    ")");

    const bool feasible = std::any_of(config_.begin(), config_.end(), [&](const NodeConfig& n) {
        return demand.cpus <= n.cpus && demand.memMiB <= n.memMiB;
    });
    if (!feasible)
        throw NeverSchedulable("demand " + std::to_string(demand.cpus) + " cpus / " +
                               std::to_string(demand.memMiB) +
                               " MiB exceeds every node's capacity");

    SlurmJobRecord job;
    job.jobId = nextJobId_++;
    job.script = script;
    job.demand = demand;
    job.behavior = behavior;
    job.submitTick = tick_;
    queue_.push_back(job.jobId);
    jobs_[job.jobId] = std::move(job);
    return nextJobId_ - 1;
}

void SlurmSimulator::transition(SlurmJobRecord& job, JobState to,
                                std::vector<SimEvent>* out) {
    SimEvent ev{tick_, job.jobId, job.state, to};
    job.state = to;
    trace_.push_back(ev);
    if (out) out->push_back(ev);
    assert_conservation();
}

void SlurmSimulator::free_resources(const SlurmJobRecord& job) {
    for (std::size_t i = 0; i < config_.size(); ++i) {
        if (config_[i].name == job.nodeName) {
            load_[i].cpusUsed -= job.demand.cpus;
            load_[i].memUsed -= job.demand.memMiB;
        }
    }
}

void SlurmSimulator::dispatch(std::vector<SimEvent>* out) {
    // Strict FCFS: stop at the first pending job that does not fit anywhere.
    while (!queue_.empty()) {
        SlurmJobRecord& job = jobs_.at(queue_.front());
        std::size_t nodeIdx = config_.size();
        for (std::size_t i = 0; i < config_.size(); ++i) {
            if (load_[i].cpusUsed + job.demand.cpus <= config_[i].cpus &&
                load_[i].memUsed + job.demand.memMiB <= config_[i].memMiB) {
                nodeIdx = i;
                break;
            }
        }
        if (nodeIdx == config_.size()) break;
        load_[nodeIdx].cpusUsed += job.demand.cpus;
        load_[nodeIdx].memUsed += job.demand.memMiB;
        job.nodeName = config_[nodeIdx].name;
        job.startTick = tick_;
        queue_.erase(queue_.begin());
        transition(job, JobState::Running, out);
    }
}

std::vector<SimEvent> SlurmSimulator::step(std::int64_t ticks) {
    std::vector<SimEvent> events;
    for (std::int64_t i = 0; i < ticks; ++i) {
        ++tick_;
        // Completions and timeouts first, in jobId order.
        for (auto& [id, job] : jobs_) {
            if (job.state != JobState::Running) continue;
            const std::int64_t elapsed = tick_ - job.startTick;
            if (elapsed >= job.behavior.runTicks) {
                free_resources(job);
                job.endTick = tick_;
                transition(job,
                           job.behavior.exitCode == 0 ? JobState::Completed
                                                      : JobState::Failed,
                           &events);
            } else if (job.demand.timeLimitTicks && elapsed >= *job.demand.timeLimitTicks) {
                free_resources(job);
                job.endTick = tick_;
                transition(job, JobState::Timeout, &events);
            }
        }
        dispatch(&events);
    }
    return events;
}

JobState SlurmSimulator::cancel(std::uint64_t jobId) {
    auto it = jobs_.find(jobId);
    if (it == jobs_.end()) throw UnknownJob("job " + std::to_string(jobId));
    SlurmJobRecord& job = it->second;
    if (is_terminal(job.state)) return job.state;
    if (job.state == JobState::Running) free_resources(job);
    std::erase(queue_, jobId);
    job.endTick = tick_;
    transition(job, JobState::Cancelled, nullptr);
    return job.state;
}

SlurmJobRecord SlurmSimulator::query(std::uint64_t jobId) const {
    auto it = jobs_.find(jobId);
    if (it == jobs_.end()) throw UnknownJob("job " + std::to_string(jobId));
    return it->second;
}

bool SlurmSimulator::quiescent() const {
    return std::all_of(jobs_.begin(), jobs_.end(),
                       [](const auto& kv) { return is_terminal(kv.second.state); });
}

std::vector<std::uint64_t> SlurmSimulator::job_ids() const {
    std::vector<std::uint64_t> out;
    for (const auto& [id, job] : jobs_) out.push_back(id);
    return out;
}

std::string SlurmSimulator::trace_text() const {
    std::string out;
    for (const auto& ev : trace_) {
        out += std::to_string(ev.tick) + " " + std::to_string(ev.jobId) + " " +
               to_string(ev.from) + "->" + to_string(ev.to) + "\n";
    }
    return out;
}

int SlurmSimulator::total_cpus() const {
    int total = 0;
    for (const auto& n : config_) total += n.cpus;
    return total;
}

std::int64_t SlurmSimulator::total_memMiB() const {
    std::int64_t total = 0;
    for (const auto& n : config_) total += n.memMiB;
    return total;
}

void SlurmSimulator::assert_conservation() const {
    for (std::size_t i = 0; i < config_.size(); ++i) {
        if (load_[i].cpusUsed < 0 || load_[i].cpusUsed > config_[i].cpus ||
            load_[i].memUsed < 0 || load_[i].memUsed > config_[i].memMiB)
            throw Error("capacity conservation violated on node " + config_[i].name);
    }
}

namespace {

JobState job_state_from_string(const std::string& s) {
    if (s == "PENDING") return JobState::Pending;
    if (s == "RUNNING") return JobState::Running;
    if (s == "COMPLETED") return JobState::Completed;
    if (s == "FAILED") return JobState::Failed;
    if (s == "CANCELLED") return JobState::Cancelled;
    return JobState::Timeout;
}

}  // namespace

Json SlurmSimulator::snapshot() const {
    Json out;
    out["tick"] = tick_;
    out["nextJobId"] = nextJobId_;
    Json jobs = Json::array();
    for (const auto& [id, job] : jobs_) {
        Json j;
        j["jobId"] = job.jobId;
        j["script"] = job.script;
        j["cpus"] = job.demand.cpus;
        j["memMiB"] = job.demand.memMiB;
        if (job.demand.timeLimitTicks) j["timeLimitTicks"] = *job.demand.timeLimitTicks;
        j["runTicks"] = job.behavior.runTicks;
        j["exitCode"] = job.behavior.exitCode;
        j["state"] = to_string(job.state);
        j["submitTick"] = job.submitTick;
        j["startTick"] = job.startTick;
        j["endTick"] = job.endTick;
        j["nodeName"] = job.nodeName;
        jobs.push_back(j);
    }
    out["jobs"] = jobs;
    out["queue"] = queue_;
    Json trace = Json::array();
    for (const auto& ev : trace_)
        trace.push_back({{"tick", ev.tick},
                         {"jobId", ev.jobId},
                         {"from", to_string(ev.from)},
                         {"to", to_string(ev.to)}});
    out["trace"] = trace;
    return out;
}

void SlurmSimulator::restore(const Json& state) {
    jobs_.clear();
    queue_.clear();
    trace_.clear();
    load_.assign(config_.size(), NodeLoad{});
    tick_ = state["tick"].get<std::int64_t>();
    nextJobId_ = state["nextJobId"].get<std::uint64_t>();
    for (const auto& j : state["jobs"]) {
        SlurmJobRecord job;
        job.jobId = j["jobId"].get<std::uint64_t>();
        job.script = j["script"].get<std::string>();
        job.demand.cpus = j["cpus"].get<int>();
        job.demand.memMiB = j["memMiB"].get<std::int64_t>();
        if (j.contains("timeLimitTicks"))
            job.demand.timeLimitTicks = j["timeLimitTicks"].get<std::int64_t>();
        job.behavior.runTicks = j["runTicks"].get<std::int64_t>();
        job.behavior.exitCode = j["exitCode"].get<int>();
        job.state = job_state_from_string(j["state"].get<std::string>());
        job.submitTick = j["submitTick"].get<std::int64_t>();
        job.startTick = j["startTick"].get<std::int64_t>();
        job.endTick = j["endTick"].get<std::int64_t>();
        job.nodeName = j["nodeName"].get<std::string>();
        if (job.state == JobState::Running) {
            for (std::size_t i = 0; i < config_.size(); ++i) {
                if (config_[i].name == job.nodeName) {
                    load_[i].cpusUsed += job.demand.cpus;
                    load_[i].memUsed += job.demand.memMiB;
                }
            }
        }
        jobs_[job.jobId] = std::move(job);
    }
    for (const auto& id : state["queue"]) queue_.push_back(id.get<std::uint64_t>());
    for (const auto& ev : state["trace"]) {
        trace_.push_back(SimEvent{ev["tick"].get<std::int64_t>(),
                                  ev["jobId"].get<std::uint64_t>(),
                                  job_state_from_string(ev["from"].get<std::string>()),
                                  job_state_from_string(ev["to"].get<std::string>())});
    }
    assert_conservation();
}

}  // namespace hpk
