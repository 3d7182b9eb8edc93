#pragma once

#include <string>
#include <vector>

#include "hpk/model.hpp"

namespace hpk {

struct Directive {
    std::string flag;   // e.g. "--cpus-per-task"
    std::string value;  // empty for bare flags
    bool passThrough = false;

    std::string render() const { return value.empty() ? flag : flag + "=" + value; }
};

struct PassThroughFlags {
    std::vector<std::string> flags;     // slurm-job.hpk.io/flags tokens, in order
    std::vector<std::string> mpiFlags;  // slurm-job.hpk.io/mpi-flags tokens, in order
};

inline constexpr const char* kFlagsAnnotation = "slurm-job.hpk.io/flags";
inline constexpr const char* kMpiFlagsAnnotation = "slurm-job.hpk.io/mpi-flags";

// Rendered script plus the structured pieces it was built from. render() is
// the bit-exact golden-file surface: "#SBATCH " directive lines first, then
// prologue, container commands, and epilogue, LF endings, trailing newline.
struct BatchScript {
    std::string jobName;
    std::vector<Directive> directives;
    std::vector<std::string> prologue;
    std::vector<std::string> containerCommands;  // one line per child container
    std::vector<std::string> epilogue;

    std::string render() const;
};

// "<namespace>.<name>", characters outside [A-Za-z0-9._-] replaced by "-",
// capped at 128 characters.
std::string job_name(const PodResource& pod);

// --ntasks=1; --cpus-per-task=ceil(sum cpu requests)>=1; --mem=<MiB>M when any
// memory is requested; --time=<minutes> from activeDeadlineSeconds.
std::vector<Directive> resources_to_directives(const PodResource& pod);

// Whitespace tokenizer that keeps double-quoted runs together and strips the
// quotes. Throws BadAnnotationSyntax on an unbalanced quote.
std::vector<std::string> tokenize_flags(const std::string& text);

PassThroughFlags annotations_to_flags(const PodResource& pod);

BatchScript build_script(const PodResource& pod, const std::string& podIP);

inline std::string render_script(const PodResource& pod, const std::string& podIP) {
    return build_script(pod, podIP).render();
}

// Effective demand the cluster sees: last --ntasks times last --cpus-per-task
// (pass-through flags override generated ones), plus --mem in MiB and --time
// in ticks. Shared by the kubelet and the simulator's submit cross-check.
struct ScriptDemand {
    int cpus = 1;
    std::int64_t memMiB = 0;
    std::optional<std::int64_t> timeLimitTicks;
};

ScriptDemand parse_script_demand(const std::string& scriptText);

}  // namespace hpk
