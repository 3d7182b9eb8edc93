#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hpk/model.hpp"
#include "hpk/store.hpp"

namespace hpk {

// Flannel-style address management: the cluster CIDR 10.244.0.0/16 is sliced
// into one /24 per simulated node (node index i gets 10.244.i.0/24). Within a
// subnet, .0 is the network address and .1 the gateway, so pods start at .2.
// Allocation always returns the lowest free address, freed addresses included.
class Ipam {
public:
    explicit Ipam(std::vector<std::string> nodeNames);

    // Throws AlreadyAllocated / SubnetExhausted / NotFound (unknown node).
    std::string allocate(const std::string& podKey, const std::string& nodeName);

    // First node, in order, with a free address.
    std::string allocate_anywhere(const std::string& podKey);

    // Throws NotAllocated.
    void release(const std::string& podKey);

    std::optional<std::string> address_of(const std::string& podKey) const;
    std::vector<std::string> leased_pod_keys() const;
    std::size_t lease_count() const { return byPod_.size(); }

    Json snapshot() const;
    void restore(const Json& state);

private:
    struct Subnet {
        std::string nodeName;
        int index = 0;
        std::set<int> used;  // host octets in [2, 254]
    };

    std::vector<Subnet> subnets_;
    std::map<std::string, std::pair<std::size_t, int>> byPod_;  // key -> (subnet, octet)

    std::string try_allocate(std::size_t subnetIdx, const std::string& podKey);
};

// CoreDNS stand-in for headless services: resolves
// "<service>.<namespace>.svc.cluster.local" to the sorted IPs of Running pods
// matching the service selector. Computed from live store state on every call.
// nullopt means NXDOMAIN (unknown service); an existing service with no ready
// pods resolves to an empty list.
std::optional<std::vector<std::string>> resolve_service(const Store& store,
                                                        const std::string& serviceName,
                                                        const std::string& ns);

std::string service_fqdn(const std::string& serviceName, const std::string& ns);

}  // namespace hpk
