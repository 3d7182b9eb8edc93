#include <doctest.h>

#include "hpk/errors.hpp"
#include "hpk/kubelet.hpp"
#include "test_support.hpp"

using namespace hpk;
using hpk::testing::make_pod;

namespace {

struct Rig {
    Store store;
    SlurmSimulator sim;
    Ipam ipam;
    std::map<std::string, JobBehavior> behaviors;  // by pod name
    Kubelet kubelet;

    explicit Rig(std::vector<NodeConfig> nodes = {{"n0", 8, 16384}})
        : sim(nodes),
          ipam([&nodes] {
              std::vector<std::string> names;
              for (const auto& n : nodes) names.push_back(n.name);
              return names;
          }()),
          kubelet(store, sim, ipam, [this](const PodResource& pod, int) {
              auto it = behaviors.find(pod.meta.name);
              return it == behaviors.end() ? JobBehavior{1, 0} : it->second;
          }) {
        kubelet.register_node();
    }

    // Schedule then reconcile, as the engine loop does.
    void settle() {
        for (;;) {
            store.bind_pending_pods();
            if (!kubelet.pump()) break;
        }
    }

    void tick() {
        auto events = sim.step(1);
        kubelet.process_sim_events(events);
        settle();
    }

    PodResource pod(const std::string& name) {
        return std::get<PodResource>(store.get({"Pod", "default", name})->body);
    }
};

}  // namespace

TEST_CASE("register_node publishes the cluster totals as one virtual node") {
    Rig rig({{"n0", 8, 16384}, {"n1", 4, 8192}});
    auto stored = rig.store.get({"Node", "", kVirtualNodeName});
    REQUIRE(stored.has_value());
    const auto& node = std::get<NodeResource>(stored->body);
    CHECK(node.cpus == 12);
    CHECK(node.memMiB == 24576);
}

TEST_CASE("an empty cluster cannot register a node") {
    Store store;
    SlurmSimulator sim({});
    Ipam ipam(std::vector<std::string>{});
    Kubelet kubelet(store, sim, ipam, [](const PodResource&, int) { return JobBehavior{}; });
    CHECK_THROWS_AS(kubelet.register_node(), EmptyCluster);
}

TEST_CASE("sync-status covers every job state") {
    using P = std::pair<PodPhase, std::string>;
    CHECK(Kubelet::sync_status(JobState::Pending, 0) == P{PodPhase::Pending, ""});
    CHECK(Kubelet::sync_status(JobState::Running, 0) == P{PodPhase::Running, ""});
    CHECK(Kubelet::sync_status(JobState::Completed, 0) == P{PodPhase::Succeeded, ""});
    CHECK(Kubelet::sync_status(JobState::Failed, 2) == P{PodPhase::Failed, "Error"});
    CHECK(Kubelet::sync_status(JobState::Timeout, 0) ==
          P{PodPhase::Failed, "DeadlineExceeded"});
    CHECK(Kubelet::sync_status(JobState::Cancelled, 0) == P{PodPhase::Failed, "Cancelled"});
}

TEST_CASE("a bound pod is submitted exactly once") {
    Rig rig;
    rig.store.put(make_pod("a"));
    rig.settle();
    REQUIRE(rig.kubelet.bindings().size() == 1);
    const auto& binding = rig.kubelet.bindings().begin()->second;
    CHECK(binding.jobId == 1);
    CHECK(rig.sim.query(1).state == JobState::Pending);
    CHECK(binding.podIP == "10.244.0.2");

    rig.settle();  // re-pumping the same events must not resubmit
    CHECK(rig.sim.job_count() == 1);
}

TEST_CASE("pod phases follow the job through its lifecycle") {
    Rig rig;
    rig.behaviors["a"] = {3, 0};
    rig.store.put(make_pod("a"));
    rig.settle();
    CHECK(rig.pod("a").status.phase == PodPhase::Pending);

    rig.tick();
    CHECK(rig.pod("a").status.phase == PodPhase::Running);
    CHECK(rig.pod("a").status.podIP == "10.244.0.2");

    rig.tick();
    rig.tick();
    rig.tick();
    CHECK(rig.pod("a").status.phase == PodPhase::Succeeded);
    CHECK(rig.pod("a").status.podIP == "10.244.0.2");  // kept after success
}

TEST_CASE("failed jobs surface the exit code") {
    Rig rig;
    rig.behaviors["a"] = {1, 7};
    rig.store.put(make_pod("a"));
    rig.settle();
    rig.tick();
    rig.tick();
    auto pod = rig.pod("a");
    CHECK(pod.status.phase == PodPhase::Failed);
    CHECK(pod.status.reason == "Error");
    CHECK(pod.status.exitCode == 7);
}

TEST_CASE("deadline exceeded maps to Failed/DeadlineExceeded") {
    Rig rig;
    rig.behaviors["a"] = {100, 0};
    auto pod = make_pod("a");
    pod.activeDeadlineSeconds = 120;  // 2 ticks
    rig.store.put(pod);
    rig.settle();
    for (int i = 0; i < 5; ++i) rig.tick();
    CHECK(rig.pod("a").status.phase == PodPhase::Failed);
    CHECK(rig.pod("a").status.reason == "DeadlineExceeded");
}

TEST_CASE("OnFailure restarts up to the cap, then fails") {
    Rig rig;
    rig.behaviors["a"] = {1, 3};  // always fails
    auto pod = make_pod("a");
    pod.restartPolicy = RestartPolicy::OnFailure;
    rig.store.put(pod);
    rig.settle();
    for (int i = 0; i < 20; ++i) rig.tick();

    CHECK(rig.pod("a").status.phase == PodPhase::Failed);
    REQUIRE(rig.kubelet.bindings().size() == 1);
    CHECK(rig.kubelet.bindings().begin()->second.restartCount == Kubelet::kRestartCap);
    CHECK(rig.sim.job_count() == 1 + Kubelet::kRestartCap);  // initial + 3 retries
}

TEST_CASE("OnFailure stops retrying once an attempt succeeds") {
    int attempts = 0;
    Store store;
    SlurmSimulator sim({{"n0", 8, 16384}});
    Ipam ipam({"n0"});
    Kubelet kubelet(store, sim, ipam, [&attempts](const PodResource&, int attempt) {
        attempts = attempt;
        return attempt < 2 ? JobBehavior{1, 1} : JobBehavior{1, 0};
    });
    kubelet.register_node();
    auto pod = make_pod("a");
    pod.restartPolicy = RestartPolicy::OnFailure;
    store.put(pod);
    store.bind_pending_pods();
    kubelet.pump();
    for (int i = 0; i < 10; ++i) {
        auto events = sim.step(1);
        kubelet.process_sim_events(events);
        kubelet.pump();
    }
    auto result = std::get<PodResource>(store.get({"Pod", "default", "a"})->body);
    CHECK(result.status.phase == PodPhase::Succeeded);
    CHECK(attempts == 2);
    CHECK(sim.job_count() == 3);
}

TEST_CASE("Never policy does not restart a failed pod") {
    Rig rig;
    rig.behaviors["a"] = {1, 1};
    rig.store.put(make_pod("a"));  // restartPolicy defaults to Never
    rig.settle();
    for (int i = 0; i < 5; ++i) rig.tick();
    CHECK(rig.pod("a").status.phase == PodPhase::Failed);
    CHECK(rig.sim.job_count() == 1);
}

TEST_CASE("deleting a pod cancels its job and releases its lease") {
    Rig rig;
    rig.behaviors["a"] = {100, 0};
    rig.store.put(make_pod("a"));
    rig.settle();
    rig.tick();
    CHECK(rig.sim.query(1).state == JobState::Running);
    CHECK(rig.ipam.lease_count() == 1);

    rig.store.erase({"Pod", "default", "a"});
    rig.settle();
    CHECK(rig.sim.query(1).state == JobState::Cancelled);
    CHECK(rig.ipam.lease_count() == 0);
    CHECK(rig.kubelet.bindings().empty());
}

TEST_CASE("deleting an already-finished pod cancels nothing") {
    Rig rig;
    rig.store.put(make_pod("a"));
    rig.settle();
    for (int i = 0; i < 3; ++i) rig.tick();
    CHECK(rig.pod("a").status.phase == PodPhase::Succeeded);

    rig.store.erase({"Pod", "default", "a"});
    rig.settle();
    CHECK(rig.sim.query(1).state == JobState::Completed);
    CHECK(rig.ipam.lease_count() == 0);
    for (const auto& line : rig.kubelet.action_log())
        CHECK(line.find("CANCEL") == std::string::npos);
}

TEST_CASE("an unschedulable pod fails without leaking a lease") {
    Rig rig({{"n0", 2, 1024}});
    rig.store.put(make_pod("big", "4"));
    rig.settle();
    auto pod = rig.pod("big");
    CHECK(pod.status.phase == PodPhase::Failed);
    CHECK(pod.status.reason == "Unschedulable");
    CHECK(rig.ipam.lease_count() == 0);
    CHECK(rig.kubelet.bindings().empty());
    CHECK(rig.sim.job_count() == 0);
}

TEST_CASE("spec edits while the job is live are logged and ignored") {
    Rig rig;
    rig.behaviors["a"] = {100, 0};
    rig.store.put(make_pod("a", "1"));
    rig.settle();

    auto edited = rig.pod("a");
    edited.containers[0].image = "busybox:1.37";
    rig.store.put(edited);
    rig.settle();

    CHECK(rig.sim.job_count() == 1);  // no resubmission
    bool logged = false;
    for (const auto& line : rig.kubelet.action_log())
        if (line.find("IGNORE-SPEC-CHANGE") != std::string::npos) logged = true;
    CHECK(logged);
}

TEST_CASE("status-only writes do not provoke actions") {
    Rig rig;
    rig.behaviors["a"] = {100, 0};
    rig.store.put(make_pod("a"));
    rig.settle();
    rig.tick();
    const auto logSize = rig.kubelet.action_log().size();
    rig.settle();
    rig.settle();
    CHECK(rig.kubelet.action_log().size() == logSize);
    CHECK(rig.sim.job_count() == 1);
}

TEST_CASE("kubelet snapshot/restore keeps bindings consistent") {
    Rig rig;
    rig.behaviors["a"] = {5, 0};
    rig.store.put(make_pod("a"));
    rig.settle();
    rig.tick();
    Json snap = rig.kubelet.snapshot();

    Kubelet restored(rig.store, rig.sim, rig.ipam,
                     [](const PodResource&, int) { return JobBehavior{1, 0}; });
    restored.restore(snap);
    CHECK(restored.snapshot() == snap);
    CHECK(restored.bindings().size() == 1);
    CHECK(restored.bindings().begin()->second.podIP == "10.244.0.2");
}
