#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hpk/model.hpp"

namespace hpk {

struct NodeConfig {
    std::string name;
    int cpus = 0;
    std::int64_t memMiB = 0;
};

struct JobDemand {
    int cpus = 1;
    std::int64_t memMiB = 0;
    std::optional<std::int64_t> timeLimitTicks;
};

// Scripted outcome: the job "runs" for runTicks virtual ticks and then
// finishes with exitCode. Real command execution is out of scope.
struct JobBehavior {
    std::int64_t runTicks = 1;
    int exitCode = 0;
};

enum class JobState { Pending, Running, Completed, Failed, Cancelled, Timeout };

const char* to_string(JobState s);
bool is_terminal(JobState s);

struct SlurmJobRecord {
    std::uint64_t jobId = 0;
    std::string script;
    JobDemand demand;
    JobBehavior behavior;
    JobState state = JobState::Pending;
    std::int64_t submitTick = 0;
    std::int64_t startTick = -1;
    std::int64_t endTick = -1;
    std::string nodeName;  // set once running
};

struct SimEvent {
    std::int64_t tick = 0;
    std::uint64_t jobId = 0;
    JobState from = JobState::Pending;
    JobState to = JobState::Pending;
};

// Deterministic discrete-event Slurm cluster: integer ticks, strict FCFS
// dispatch (a blocked queue head blocks everything behind it), first-fit node
// selection in fixed node order. Single-threaded; submit/step/cancel must be
// externally serialized.
class SlurmSimulator {
public:
    explicit SlurmSimulator(std::vector<NodeConfig> nodes);

    // Throws NeverSchedulable when the demand exceeds every node's total
    // capacity. The supplied demand must match what the script's directives
    // say (cross-checked, throws Error on mismatch).
    std::uint64_t submit(const std::string& script, JobDemand demand, JobBehavior behavior);

    std::vector<SimEvent> step(std::int64_t ticks);

    JobState cancel(std::uint64_t jobId);

    // Immutable snapshot; throws UnknownJob.
    SlurmJobRecord query(std::uint64_t jobId) const;

    std::int64_t now() const { return tick_; }
    bool quiescent() const;
    std::size_t job_count() const { return jobs_.size(); }
    std::vector<std::uint64_t> job_ids() const;

    const std::vector<SimEvent>& trace() const { return trace_; }
    // "<tick> <jobId> <from>-><to>" per line.
    std::string trace_text() const;

    const std::vector<NodeConfig>& nodes() const { return config_; }
    int total_cpus() const;
    std::int64_t total_memMiB() const;

    Json snapshot() const;
    void restore(const Json& state);

private:
    struct NodeLoad {
        int cpusUsed = 0;
        std::int64_t memUsed = 0;
    };

    std::vector<NodeConfig> config_;
    std::vector<NodeLoad> load_;
    std::map<std::uint64_t, SlurmJobRecord> jobs_;
    std::vector<std::uint64_t> queue_;  // pending jobs in submit order
    std::uint64_t nextJobId_ = 1;
    std::int64_t tick_ = 0;
    std::vector<SimEvent> trace_;

    void transition(SlurmJobRecord& job, JobState to, std::vector<SimEvent>* out);
    void free_resources(const SlurmJobRecord& job);
    void dispatch(std::vector<SimEvent>* out);
    void assert_conservation() const;
};

}  // namespace hpk
