#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hpk/manifest.hpp"
#include "hpk/translator.hpp"
#include "test_support.hpp"

using namespace hpk;
using hpk::testing::read_fixture;

namespace {

// Every golden pod renders against the same fixed address so the files do not
// depend on allocation order.
constexpr const char* kGoldenIP = "10.244.0.2";

std::vector<PodResource> golden_pods() {
    std::vector<PodResource> pods;
    for (const auto& doc : parse_manifest(read_fixture("golden_pods.yaml")).documents) {
        REQUIRE(doc.resource.has_value());
        pods.push_back(std::get<PodResource>(*doc.resource));
    }
    return pods;
}

std::string golden_name(const PodResource& pod) { return job_name(pod) + ".sbatch"; }

// Re-derives a directive value straight from the pod, bypassing
// resources_to_directives.
long long recompute_cpus(const PodResource& pod) {
    long long millis = 0;
    for (const auto& c : pod.containers)
        if (c.resources.cpuRequest) millis += c.resources.cpuRequest->canonical;
    const long long cpus = (millis + 999) / 1000;
    return cpus < 1 ? 1 : cpus;
}

long long recompute_memMiB(const PodResource& pod) {
    long long bytes = 0;
    for (const auto& c : pod.containers)
        if (c.resources.memoryRequest) bytes += c.resources.memoryRequest->canonical;
    if (bytes == 0) return 0;
    const long long mib = (bytes + (1 << 20) - 1) / (1 << 20);
    return mib < 1 ? 1 : mib;
}

std::map<std::string, std::string> sbatch_values(const std::string& script) {
    std::map<std::string, std::string> values;  // last occurrence wins
    std::istringstream in(script);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.starts_with("#SBATCH ")) continue;
        const std::string rest = line.substr(8);
        const auto eq = rest.find('=', 2);
        if (eq == std::string::npos)
            values[rest] = "";
        else
            values[rest.substr(0, eq)] = rest.substr(eq + 1);
    }
    return values;
}

}  // namespace

TEST_CASE("the golden corpus covers at least ten pods") {
    CHECK(golden_pods().size() >= 10);
}

TEST_CASE("rendered scripts are byte-identical to the committed goldens") {
    for (const auto& pod : golden_pods()) {
        CAPTURE(pod.meta.name);
        const std::string rendered = render_script(pod, kGoldenIP);
        CHECK(rendered == read_fixture("golden/" + golden_name(pod)));
    }
}

TEST_CASE("golden scripts satisfy the structural invariants") {
    for (const auto& pod : golden_pods()) {
        CAPTURE(pod.meta.name);
        const std::string script = render_script(pod, kGoldenIP);

        CHECK(script.starts_with("#!/bin/bash\n"));
        CHECK(script.back() == '\n');

        // one parent instance start, one stop, one exec per container
        std::size_t starts = 0, stops = 0, execs = 0, pos = 0;
        while ((pos = script.find("apptainer instance start", pos)) != std::string::npos) {
            ++starts;
            pos += 1;
        }
        pos = 0;
        while ((pos = script.find("apptainer instance stop", pos)) != std::string::npos) {
            ++stops;
            pos += 1;
        }
        pos = 0;
        while ((pos = script.find("apptainer exec --join-net", pos)) != std::string::npos) {
            ++execs;
            pos += 1;
        }
        CHECK(starts == 1);
        CHECK(stops == 1);
        CHECK(execs == pod.containers.size());

        // each container's image appears exactly once
        for (const auto& c : pod.containers) {
            std::size_t hits = 0;
            pos = 0;
            const std::string needle = "docker://" + c.image + " ";
            while ((pos = script.find(needle, pos)) != std::string::npos) {
                ++hits;
                pos += 1;
            }
            CHECK(hits == 1);
        }

        // the pod IP appears exactly once, on the parent start line
        std::size_t ipHits = 0;
        pos = 0;
        while ((pos = script.find(kGoldenIP, pos)) != std::string::npos) {
            ++ipHits;
            pos += 1;
        }
        CHECK(ipHits == 1);
    }
}

TEST_CASE("golden directive values agree with recomputation from the pod") {
    for (const auto& pod : golden_pods()) {
        CAPTURE(pod.meta.name);
        auto values = sbatch_values(read_fixture("golden/" + golden_name(pod)));

        CHECK(values.at("--job-name") == job_name(pod));
        CHECK(values.at("--output") == job_name(pod) + ".stdout");
        CHECK(values.at("--error") == job_name(pod) + ".stderr");

        // Effective values include annotation overrides, so only pods without
        // a flags annotation are cross-checked against pure recomputation.
        if (!pod.meta.annotations.contains(kFlagsAnnotation)) {
            CHECK(values.at("--ntasks") == "1");
            CHECK(values.at("--cpus-per-task") == std::to_string(recompute_cpus(pod)));
            const long long mem = recompute_memMiB(pod);
            if (mem == 0)
                CHECK(!values.contains("--mem"));
            else
                CHECK(values.at("--mem") == std::to_string(mem) + "M");
        }
        if (pod.activeDeadlineSeconds) {
            const long long minutes = (*pod.activeDeadlineSeconds + 59) / 60;
            CHECK(values.at("--time") == std::to_string(minutes < 1 ? 1 : minutes));
        } else if (!pod.meta.annotations.contains(kFlagsAnnotation)) {
            CHECK(!values.contains("--time"));
        }
    }
}
