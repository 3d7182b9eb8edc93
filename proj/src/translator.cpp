#include "hpk/translator.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "hpk/errors.hpp"

namespace hpk {

namespace {

constexpr const char* kParentImage = "docker://registry.k8s.io/pause:3.9";

bool shell_safe(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '@' || c == '%' || c == '_' || c == '+' ||
               c == '=' || c == ':' || c == ',' || c == '.' || c == '/' || c == '-';
    });
}

std::string shell_quote(const std::string& s) {
    if (shell_safe(s)) return s;
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

std::string rc_var(const std::string& containerName) {
    std::string out = "rc_";
    for (char c : containerName)
        out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

std::string flag_name(const std::string& token) {
    auto eq = token.find('=');
    return eq == std::string::npos ? token : token.substr(0, eq);
}

}  // namespace

std::string job_name(const PodResource& pod) {
    std::string raw = pod.meta.ns + "." + pod.meta.name;
    for (char& c : raw) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' &&
            c != '-')
            c = '-';
    }
    if (raw.size() > 128) raw.resize(128);
    return raw;
}

std::vector<Directive> resources_to_directives(const PodResource& pod) {
    std::int64_t cpuMillis = 0;
    std::int64_t memBytes = 0;
    bool anyMem = false;
    for (const auto& c : pod.containers) {
        if (c.resources.cpuRequest) cpuMillis += c.resources.cpuRequest->canonical;
        if (c.resources.memoryRequest) {
            memBytes += c.resources.memoryRequest->canonical;
            anyMem = true;
        }
    }

    std::vector<Directive> out;
    out.push_back({"--ntasks", "1"});
    const std::int64_t cpus = std::max<std::int64_t>(1, (cpuMillis + 999) / 1000);
    out.push_back({"--cpus-per-task", std::to_string(cpus)});
    if (anyMem) {
        constexpr std::int64_t kMiB = 1024 * 1024;
        const std::int64_t mib = std::max<std::int64_t>(1, (memBytes + kMiB - 1) / kMiB);
        out.push_back({"--mem", std::to_string(mib) + "M"});
    }
    if (pod.activeDeadlineSeconds) {
        const std::int64_t minutes = (*pod.activeDeadlineSeconds + 59) / 60;
        out.push_back({"--time", std::to_string(std::max<std::int64_t>(1, minutes))});
    }
    return out;
}

std::vector<std::string> tokenize_flags(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    bool inToken = false;
    bool inQuote = false;
    for (char c : text) {
        if (c == '"') {
            inQuote = !inQuote;
            inToken = true;
            continue;
        }
        if (!inQuote && std::isspace(static_cast<unsigned char>(c))) {
            if (inToken) {
                tokens.push_back(current);
                current.clear();
                inToken = false;
            }
            continue;
        }
        current += c;
        inToken = true;
    }
    if (inQuote) throw BadAnnotationSyntax("unbalanced quote in: " + text);
    if (inToken) tokens.push_back(current);
    return tokens;
}

PassThroughFlags annotations_to_flags(const PodResource& pod) {
    PassThroughFlags out;
    if (auto it = pod.meta.annotations.find(kFlagsAnnotation);
        it != pod.meta.annotations.end())
        out.flags = tokenize_flags(it->second);
    if (auto it = pod.meta.annotations.find(kMpiFlagsAnnotation);
        it != pod.meta.annotations.end())
        out.mpiFlags = tokenize_flags(it->second);
    return out;
}

BatchScript build_script(const PodResource& pod, const std::string& podIP) {
    if (podIP.empty()) throw UnallocatedIP("pod " + pod.meta.ns + "/" + pod.meta.name);

    BatchScript script;
    script.jobName = job_name(pod);

    script.directives.push_back({"--job-name", script.jobName});
    for (auto& d : resources_to_directives(pod)) script.directives.push_back(std::move(d));
    script.directives.push_back({"--output", script.jobName + ".stdout"});
    script.directives.push_back({"--error", script.jobName + ".stderr"});

    PassThroughFlags pass = annotations_to_flags(pod);
    for (const auto& token : pass.flags)
        script.directives.push_back({token, "", true});

    const std::string parent = script.jobName + ".parent";
    script.prologue.push_back("# parent container holds the pod network identity; runs as fakeroot");
    script.prologue.push_back("apptainer instance start --net --ip " + podIP +
                              " --fakeroot " + kParentImage + " " + parent);
    if (!pass.mpiFlags.empty()) {
        std::string joined;
        for (const auto& t : pass.mpiFlags) {
            if (!joined.empty()) joined += " ";
            joined += t;
        }
        script.prologue.push_back("export HPK_MPI_FLAGS=" + shell_quote(joined));
    }

    // Declared volumes as bind specs, shared by every child that mounts them.
    for (const auto& c : pod.containers) {
        std::string line = "apptainer exec --join-net instance://" + parent + " --fakeroot";
        for (const auto& m : c.volumeMounts) {
            for (const auto& v : pod.volumes) {
                if (v.name == m.volumeName)
                    line += " --bind " + v.hostPath + ":" + m.mountPath;
            }
        }
        line += " docker://" + c.image;
        for (const auto& word : c.command) line += " " + shell_quote(word);
        for (const auto& word : c.args) line += " " + shell_quote(word);
        line += "; " + rc_var(c.name) + "=$?";
        script.containerCommands.push_back(std::move(line));
    }

    for (const auto& c : pod.containers)
        script.epilogue.push_back("echo \"" + c.name + " ${" + rc_var(c.name) + "}\" >> " +
                                  script.jobName + ".status");
    script.epilogue.push_back("apptainer instance stop " + parent);
    return script;
}

std::string BatchScript::render() const {
    std::string out = "#!/bin/bash\n";
    std::set<std::string> generated;
    for (const auto& d : directives)
        if (!d.passThrough) generated.insert(d.flag);
    for (const auto& d : directives) {
        if (d.passThrough && generated.contains(flag_name(d.flag)))
            out += "# pass-through flag overrides generated " + flag_name(d.flag) + "\n";
        out += "#SBATCH " + d.render() + "\n";
    }
    out += "\n";
    for (const auto& line : prologue) out += line + "\n";
    out += "\n";
    for (const auto& line : containerCommands) out += line + "\n";
    out += "\n";
    for (const auto& line : epilogue) out += line + "\n";
    return out;
}

ScriptDemand parse_script_demand(const std::string& scriptText) {
    ScriptDemand demand;
    std::int64_t ntasks = 1;
    std::int64_t cpusPerTask = 1;

    std::size_t pos = 0;
    while (pos < scriptText.size()) {
        std::size_t end = scriptText.find('\n', pos);
        if (end == std::string::npos) end = scriptText.size();
        std::string line = scriptText.substr(pos, end - pos);
        pos = end + 1;
        if (!line.starts_with("#SBATCH ")) continue;
        const std::string token = line.substr(8);
        const std::string flag = flag_name(token);
        const auto eq = token.find('=');
        const std::string value = eq == std::string::npos ? "" : token.substr(eq + 1);
        try {
            if (flag == "--ntasks") {
                ntasks = std::stoll(value);
            } else if (flag == "--cpus-per-task") {
                cpusPerTask = std::stoll(value);
            } else if (flag == "--mem") {
                std::size_t used = 0;
                std::int64_t n = std::stoll(value, &used);
                const std::string suffix = value.substr(used);
                if (suffix == "G") n *= 1024;
                else if (suffix == "K") n = (n + 1023) / 1024;
                demand.memMiB = n;
            } else if (flag == "--time") {
                demand.timeLimitTicks = std::stoll(value);
            }
        } catch (const std::exception&) {
            // Malformed pass-through values are kept verbatim in the script
            // but do not contribute to the demand.
        }
    }
    demand.cpus = static_cast<int>(std::max<std::int64_t>(1, ntasks * cpusPerTask));
    return demand;
}

}  // namespace hpk
