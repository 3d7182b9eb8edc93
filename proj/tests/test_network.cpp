#include <doctest.h>

#include <set>

#include "hpk/errors.hpp"
#include "hpk/network.hpp"
#include "test_support.hpp"

using namespace hpk;
using hpk::testing::make_pod;

TEST_CASE("node subnets are /24 slices of the cluster CIDR by index") {
    Ipam ipam({"n0", "n1", "n2"});
    CHECK(ipam.allocate("a", "n0") == "10.244.0.2");
    CHECK(ipam.allocate("b", "n1") == "10.244.1.2");
    CHECK(ipam.allocate("c", "n2") == "10.244.2.2");
}

TEST_CASE("allocation returns the lowest free address and reuses freed ones") {
    Ipam ipam({"n0"});
    CHECK(ipam.allocate("a", "n0") == "10.244.0.2");
    CHECK(ipam.allocate("b", "n0") == "10.244.0.3");
    CHECK(ipam.allocate("c", "n0") == "10.244.0.4");
    ipam.release("b");
    CHECK(ipam.allocate("d", "n0") == "10.244.0.3");
}

TEST_CASE("double allocation and unknown releases throw") {
    Ipam ipam({"n0"});
    ipam.allocate("a", "n0");
    CHECK_THROWS_AS(ipam.allocate("a", "n0"), AlreadyAllocated);
    CHECK_THROWS_AS(ipam.release("ghost"), NotAllocated);
    CHECK_THROWS_AS(ipam.allocate("b", "missing-node"), NotFound);
}

TEST_CASE("a /24 holds exactly 253 pod addresses") {
    Ipam ipam({"n0"});
    for (int i = 0; i < 253; ++i) ipam.allocate("p" + std::to_string(i), "n0");
    CHECK_THROWS_AS(ipam.allocate("overflow", "n0"), SubnetExhausted);
    ipam.release("p0");
    CHECK(ipam.allocate("again", "n0") == "10.244.0.2");
}

TEST_CASE("allocate-anywhere spills to the next node when a subnet is full") {
    Ipam ipam({"n0", "n1"});
    for (int i = 0; i < 253; ++i) ipam.allocate("p" + std::to_string(i), "n0");
    CHECK(ipam.allocate_anywhere("spill") == "10.244.1.2");
}

TEST_CASE("all leased addresses are unique") {
    Ipam ipam({"n0", "n1"});
    std::set<std::string> seen;
    for (int i = 0; i < 300; ++i) {
        auto ip = ipam.allocate_anywhere("p" + std::to_string(i));
        CHECK(seen.insert(ip).second);
    }
    CHECK(ipam.lease_count() == 300);
}

TEST_CASE("ipam snapshot/restore round-trips") {
    Ipam ipam({"n0", "n1"});
    ipam.allocate("a", "n0");
    ipam.allocate("b", "n1");
    ipam.release("a");
    Json snap = ipam.snapshot();

    Ipam restored({"n0", "n1"});
    restored.restore(snap);
    CHECK(restored.snapshot() == snap);
    CHECK(restored.address_of("b") == ipam.address_of("b"));
    CHECK(restored.allocate("c", "n0") == "10.244.0.2");
}

namespace {

ServiceResource selector_service(const std::string& name,
                                 const std::map<std::string, std::string>& selector) {
    ServiceResource svc;
    svc.meta.name = name;
    svc.selector = selector;
    svc.ports.push_back({"http", 80, 8080});
    return svc;
}

PodResource running_pod(const std::string& name, const std::string& ip,
                        const std::map<std::string, std::string>& labels) {
    auto pod = make_pod(name);
    pod.meta.labels = labels;
    pod.status.phase = PodPhase::Running;
    pod.status.podIP = ip;
    return pod;
}

}  // namespace

TEST_CASE("unknown service resolves to NXDOMAIN") {
    Store store;
    CHECK(!resolve_service(store, "ghost", "default").has_value());
}

TEST_CASE("service with no ready pods resolves to an empty list") {
    Store store;
    store.put(selector_service("web", {{"app", "web"}}));
    auto ips = resolve_service(store, "web", "default");
    REQUIRE(ips.has_value());
    CHECK(ips->empty());
}

TEST_CASE("resolution returns sorted IPs of Running selector matches only") {
    Store store;
    store.put(selector_service("web", {{"app", "web"}}));
    store.put(running_pod("b", "10.244.0.5", {{"app", "web"}}));
    store.put(running_pod("a", "10.244.0.3", {{"app", "web"}}));
    store.put(running_pod("other", "10.244.0.9", {{"app", "db"}}));
    auto pending = make_pod("pending");
    pending.meta.labels = {{"app", "web"}};
    store.put(pending);

    auto ips = resolve_service(store, "web", "default");
    REQUIRE(ips.has_value());
    CHECK(*ips == std::vector<std::string>{"10.244.0.3", "10.244.0.5"});
}

TEST_CASE("resolution tracks phase transitions") {
    Store store;
    store.put(selector_service("web", {{"app", "web"}}));
    store.put(running_pod("a", "10.244.0.2", {{"app", "web"}}));
    CHECK(resolve_service(store, "web", "default")->size() == 1);

    auto obj = store.get({"Pod", "default", "a"});
    auto pod = std::get<PodResource>(obj->body);
    pod.status.phase = PodPhase::Succeeded;
    store.put(pod);
    CHECK(resolve_service(store, "web", "default")->empty());
}

TEST_CASE("resolution is namespace-scoped") {
    Store store;
    store.put(selector_service("web", {{"app", "web"}}));
    auto pod = running_pod("a", "10.244.0.2", {{"app", "web"}});
    pod.meta.ns = "other";
    store.put(pod);
    CHECK(resolve_service(store, "web", "default")->empty());
    CHECK(!resolve_service(store, "web", "other").has_value());
}

TEST_CASE("multi-key selectors require all labels to match") {
    Store store;
    store.put(selector_service("web", {{"app", "web"}, {"tier", "front"}}));
    store.put(running_pod("both", "10.244.0.2", {{"app", "web"}, {"tier", "front"}}));
    store.put(running_pod("one", "10.244.0.3", {{"app", "web"}}));
    auto ips = resolve_service(store, "web", "default");
    REQUIRE(ips.has_value());
    CHECK(*ips == std::vector<std::string>{"10.244.0.2"});
}

TEST_CASE("service fqdn follows the cluster-local convention") {
    CHECK(service_fqdn("web", "default") == "web.default.svc.cluster.local");
    CHECK(service_fqdn("db", "prod") == "db.prod.svc.cluster.local");
}
