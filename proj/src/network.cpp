#include "hpk/network.hpp"

#include <algorithm>

#include "hpk/errors.hpp"

namespace hpk {

namespace {

std::string octet_address(int subnetIndex, int host) {
    return "10.244." + std::to_string(subnetIndex) + "." + std::to_string(host);
}

}  // namespace

Ipam::Ipam(std::vector<std::string> nodeNames) {
    int index = 0;
    for (auto& name : nodeNames) subnets_.push_back(Subnet{std::move(name), index++, {}});
}

std::string Ipam::try_allocate(std::size_t subnetIdx, const std::string& podKey) {
    Subnet& subnet = subnets_[subnetIdx];
    for (int host = 2; host <= 254; ++host) {
        if (!subnet.used.contains(host)) {
            subnet.used.insert(host);
            byPod_[podKey] = {subnetIdx, host};
            return octet_address(subnet.index, host);
        }
    }
    return "";
}

std::string Ipam::allocate(const std::string& podKey, const std::string& nodeName) {
    if (byPod_.contains(podKey)) throw AlreadyAllocated("pod " + podKey);
    for (std::size_t i = 0; i < subnets_.size(); ++i) {
        if (subnets_[i].nodeName != nodeName) continue;
        std::string addr = try_allocate(i, podKey);
        if (addr.empty()) throw SubnetExhausted("subnet of node " + nodeName);
        return addr;
    }
    throw NotFound("node " + nodeName + " has no subnet lease");
}

std::string Ipam::allocate_anywhere(const std::string& podKey) {
    if (byPod_.contains(podKey)) throw AlreadyAllocated("pod " + podKey);
    for (std::size_t i = 0; i < subnets_.size(); ++i) {
        std::string addr = try_allocate(i, podKey);
        if (!addr.empty()) return addr;
    }
    throw SubnetExhausted("all subnets full");
}

void Ipam::release(const std::string& podKey) {
    auto it = byPod_.find(podKey);
    if (it == byPod_.end()) throw NotAllocated("pod " + podKey);
    subnets_[it->second.first].used.erase(it->second.second);
    byPod_.erase(it);
}

std::optional<std::string> Ipam::address_of(const std::string& podKey) const {
    auto it = byPod_.find(podKey);
    if (it == byPod_.end()) return std::nullopt;
    return octet_address(subnets_[it->second.first].index, it->second.second);
}

std::vector<std::string> Ipam::leased_pod_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, lease] : byPod_) out.push_back(key);
    return out;
}

Json Ipam::snapshot() const {
    Json leases = Json::array();
    for (const auto& [key, lease] : byPod_)
        leases.push_back({{"podKey", key},
                          {"subnet", lease.first},
                          {"host", lease.second}});
    return Json{{"leases", leases}};
}

void Ipam::restore(const Json& state) {
    byPod_.clear();
    for (auto& subnet : subnets_) subnet.used.clear();
    for (const auto& lease : state["leases"]) {
        const auto subnetIdx = lease["subnet"].get<std::size_t>();
        const int host = lease["host"].get<int>();
        subnets_[subnetIdx].used.insert(host);
        byPod_[lease["podKey"].get<std::string>()] = {subnetIdx, host};
    }
}

std::string service_fqdn(const std::string& serviceName, const std::string& ns) {
    return serviceName + "." + ns + ".svc.cluster.local";
}

std::optional<std::vector<std::string>> resolve_service(const Store& store,
                                                        const std::string& serviceName,
                                                        const std::string& ns) {
    auto stored = store.get({"Service", ns, serviceName});
    if (!stored) return std::nullopt;
    const auto& svc = std::get<ServiceResource>(stored->body);

    std::vector<std::string> addresses;
    if (svc.selector.empty()) return addresses;
    for (const auto& obj : store.list("Pod")) {
        const auto& pod = std::get<PodResource>(obj.body);
        if (pod.meta.ns != ns) continue;
        if (pod.status.phase != PodPhase::Running || pod.status.podIP.empty()) continue;
        bool matches = true;
        for (const auto& [k, v] : svc.selector) {
            auto it = pod.meta.labels.find(k);
            if (it == pod.meta.labels.end() || it->second != v) {
                matches = false;
                break;
            }
        }
        if (matches) addresses.push_back(pod.status.podIP);
    }
    std::sort(addresses.begin(), addresses.end());
    return addresses;
}

}  // namespace hpk
