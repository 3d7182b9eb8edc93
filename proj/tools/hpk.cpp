#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hpk/engine.hpp"
#include "hpk/errors.hpp"
#include "hpk/manifest.hpp"
#include "hpk/network.hpp"

namespace fs = std::filesystem;
using namespace hpk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitEngineError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

Json config_to_json(const EngineConfig& config) {
    Json out;
    Json nodes = Json::array();
    for (const auto& n : config.clusterNodes)
        nodes.push_back({{"name", n.name}, {"cpus", n.cpus}, {"memMiB", n.memMiB}});
    out["clusterNodes"] = nodes;
    Json rules = Json::array();
    for (const auto& b : config.behaviors)
        rules.push_back({{"pattern", b.pattern},
                         {"runTicks", b.runTicks},
                         {"exitCodes", b.exitCodes}});
    out["behaviors"] = rules;
    out["quiescenceLimit"] = config.quiescenceLimit;
    return out;
}

EngineConfig config_from_json(const Json& j) {
    EngineConfig config;
    for (const auto& n : j["clusterNodes"])
        config.clusterNodes.push_back({n["name"].get<std::string>(), n["cpus"].get<int>(),
                                       n["memMiB"].get<std::int64_t>()});
    for (const auto& b : j["behaviors"]) {
        BehaviorRule rule;
        rule.pattern = b["pattern"].get<std::string>();
        rule.runTicks = b["runTicks"].get<std::int64_t>();
        rule.exitCodes = b["exitCodes"].get<std::vector<int>>();
        config.behaviors.push_back(std::move(rule));
    }
    config.quiescenceLimit = j["quiescenceLimit"].get<std::int64_t>();
    return config;
}

struct Session {
    std::string stateDir;
    std::unique_ptr<Engine> engine;

    std::string state_path() const { return stateDir + "/engine.json"; }

    void open(const std::string& configPath) {
        fs::create_directories(stateDir);
        if (fs::exists(state_path())) {
            Json state = Json::parse(read_file(state_path()));
            engine = std::make_unique<Engine>(config_from_json(state["config"]));
            engine->restore(state["state"]);
            return;
        }
        std::string path = configPath;
        if (path.empty() && fs::exists(stateDir + "/config.yaml"))
            path = stateDir + "/config.yaml";
        if (path.empty())
            throw NotFound("no engine state in " + stateDir +
                           " and no --config given for initialization");
        const std::string baseDir = fs::path(path).parent_path().string();
        engine = std::make_unique<Engine>(load_engine_config(read_file(path), baseDir));
    }

    void save() {
        Json state;
        state["config"] = config_to_json(engine->config());
        state["state"] = engine->snapshot();
        write_file(state_path(), state.dump(2) + "\n");
    }
};

// "pods", "pod", "Pod" -> "Pod"
std::string canonical_kind(std::string kind) {
    for (char& c : kind) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!kind.empty() && kind.back() == 's') kind.pop_back();
    if (kind == "pod") return "Pod";
    if (kind == "service" || kind == "svc") return "Service";
    if (kind == "workflow" || kind == "wf") return "Workflow";
    if (kind == "node") return "Node";
    throw NotFound("unknown kind \"" + kind + "\"");
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) return;
    std::vector<std::size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += row[i];
            if (i + 1 < row.size()) line += std::string(widths[i] - row[i].size() + 2, ' ');
        }
        std::cout << line << "\n";
    }
}

int cmd_get(Engine& engine, const std::string& kindArg, const std::string& name) {
    const std::string kind = canonical_kind(kindArg);
    auto objects = engine.store().list(kind);
    if (!name.empty()) {
        std::erase_if(objects, [&](const StoredObject& o) { return o.key.name != name; });
        if (objects.empty()) throw NotFound(kind + " \"" + name + "\" not found");
    }
    std::vector<std::vector<std::string>> rows;
    if (kind == "Pod") {
        rows.push_back({"NAMESPACE", "NAME", "PHASE", "IP", "JOB", "RESTARTS"});
        for (const auto& obj : objects) {
            const auto& pod = std::get<PodResource>(obj.body);
            std::string job = "-";
            std::string restarts = "0";
            auto it = engine.kubelet().bindings().find(obj.key);
            if (it != engine.kubelet().bindings().end()) {
                job = std::to_string(it->second.jobId);
                restarts = std::to_string(it->second.restartCount);
            }
            rows.push_back({pod.meta.ns, pod.meta.name, to_string(pod.status.phase),
                            pod.status.podIP.empty() ? "-" : pod.status.podIP, job,
                            restarts});
        }
    } else if (kind == "Service") {
        rows.push_back({"NAMESPACE", "NAME", "CLUSTER-IP", "TYPE"});
        for (const auto& obj : objects) {
            const auto& svc = std::get<ServiceResource>(obj.body);
            rows.push_back({svc.meta.ns, svc.meta.name, svc.clusterIP.value_or("-"),
                            to_string(svc.type)});
        }
    } else if (kind == "Workflow") {
        rows.push_back({"NAMESPACE", "NAME", "PHASE", "STEPS"});
        for (const auto& obj : objects) {
            const auto& wf = std::get<WorkflowResource>(obj.body);
            rows.push_back({wf.meta.ns, wf.meta.name, to_string(wf.status.phase),
                            std::to_string(wf.status.steps.size())});
        }
    } else {
        rows.push_back({"NAME", "CPUS", "MEM-MIB"});
        for (const auto& obj : objects) {
            const auto& node = std::get<NodeResource>(obj.body);
            rows.push_back({node.name, std::to_string(node.cpus),
                            std::to_string(node.memMiB)});
        }
    }
    print_table(rows);
    return kExitOk;
}

int cmd_describe(Engine& engine, const std::string& kindArg, const std::string& name,
                 const std::string& ns) {
    const std::string kind = canonical_kind(kindArg);
    auto obj = engine.store().get({kind, kind == "Node" ? "" : ns, name});
    if (!obj) throw NotFound(kind + " \"" + name + "\" not found");
    if (kind == "Pod") {
        const auto& pod = std::get<PodResource>(obj->body);
        std::cout << "Name:      " << pod.meta.name << "\n";
        std::cout << "Namespace: " << pod.meta.ns << "\n";
        std::cout << "Node:      " << (pod.nodeName.empty() ? "-" : pod.nodeName) << "\n";
        std::cout << "Phase:     " << to_string(pod.status.phase) << "\n";
        if (!pod.status.reason.empty()) std::cout << "Reason:    " << pod.status.reason << "\n";
        std::cout << "Pod IP:    " << (pod.status.podIP.empty() ? "-" : pod.status.podIP)
                  << "\n";
        auto it = engine.kubelet().bindings().find(obj->key);
        if (it != engine.kubelet().bindings().end()) {
            std::cout << "Job:       " << it->second.jobId << "\n";
            std::cout << "Restarts:  " << it->second.restartCount << "\n";
        }
        std::cout << "Containers:\n";
        for (const auto& c : pod.containers)
            std::cout << "  " << c.name << " (" << c.image << ")\n";
    } else if (kind == "Workflow") {
        const auto& wf = std::get<WorkflowResource>(obj->body);
        std::cout << "Name:      " << wf.meta.name << "\n";
        std::cout << "Namespace: " << wf.meta.ns << "\n";
        std::cout << "Phase:     " << to_string(wf.status.phase) << "\n";
        if (!wf.status.message.empty())
            std::cout << "Message:   " << wf.status.message << "\n";
        std::cout << "Steps:\n";
        for (const auto& s : wf.status.steps)
            std::cout << "  " << s.stepName << "  pod=" << (s.podName.empty() ? "-" : s.podName)
                      << "  " << to_string(s.phase) << "\n";
    } else {
        std::cout << serialize_resource(obj->body);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hpk: desk-scale Kubernetes-on-Slurm orchestration engine"};
    app.require_subcommand(1);

    std::string stateDir = std::getenv("HPK_STATE_DIR") ? std::getenv("HPK_STATE_DIR")
                                                        : "./hpk-state";
    std::string configPath;
    app.add_option("--state-dir", stateDir, "engine state directory");
    app.add_option("--config", configPath, "engine config YAML (first run only)");

    std::string file, kind, name, target;
    std::string ns = "default";
    std::int64_t untilTick = -1;
    bool toQuiescence = false;

    auto* applyCmd = app.add_subcommand("apply", "apply a manifest file");
    applyCmd->add_option("-f,--filename", file, "manifest YAML")->required();

    auto* getCmd = app.add_subcommand("get", "list objects");
    getCmd->add_option("kind", kind)->required();
    getCmd->add_option("name", name);

    auto* describeCmd = app.add_subcommand("describe", "show object details");
    describeCmd->add_option("kind", kind)->required();
    describeCmd->add_option("name", name)->required();
    describeCmd->add_option("-n,--namespace", ns);

    auto* deleteCmd = app.add_subcommand("delete", "delete an object");
    deleteCmd->add_option("kind", kind)->required();
    deleteCmd->add_option("name", name)->required();
    deleteCmd->add_option("-n,--namespace", ns);

    auto* simulateCmd = app.add_subcommand("simulate", "advance the cluster clock");
    simulateCmd->add_option("--until", untilTick, "run until this tick");
    simulateCmd->add_flag("--to-quiescence", toQuiescence, "run until nothing is in flight");

    auto* resolveCmd = app.add_subcommand("resolve", "resolve a headless service");
    resolveCmd->add_option("target", target, "NAME.NAMESPACE")->required();

    auto* exportCmd = app.add_subcommand("export-script", "write a pod's Slurm script");
    exportCmd->add_option("pod", name)->required();
    exportCmd->add_option("-n,--namespace", ns);

    auto* traceCmd = app.add_subcommand("trace", "print the full event trace");
    auto* dumpCmd = app.add_subcommand("dump", "print the control-plane state dump");

    CLI11_PARSE(app, argc, argv);

    try {
        Session session;
        session.stateDir = stateDir;
        session.open(configPath);
        Engine& engine = *session.engine;

        if (applyCmd->parsed()) {
            auto verdicts = engine.apply(read_file(file));
            bool anyRejected = false;
            for (const auto& v : verdicts) {
                std::string key = v.key;
                if (!key.empty())
                    key[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(key[0])));
                std::cout << key << " " << v.outcome << "\n";
                if (v.rejected) anyRejected = true;
            }
            session.save();
            return anyRejected ? kExitUserError : kExitOk;
        }
        if (getCmd->parsed()) return cmd_get(engine, kind, name);
        if (describeCmd->parsed()) return cmd_describe(engine, kind, name, ns);
        if (deleteCmd->parsed()) {
            const std::string k = canonical_kind(kind);
            if (!engine.erase(k, k == "Node" ? "" : ns, name))
                throw NotFound(k + " \"" + name + "\" not found");
            std::cout << k << "/" << ns << "/" << name << " deleted\n";
            session.save();
            return kExitOk;
        }
        if (simulateCmd->parsed()) {
            std::vector<SimEvent> events;
            if (toQuiescence)
                events = engine.simulate_to_quiescence();
            else if (untilTick >= 0)
                events = engine.simulate_until(untilTick);
            else
                throw NotFound("simulate needs --until N or --to-quiescence");
            for (const auto& ev : events)
                std::cout << ev.tick << " " << ev.jobId << " " << to_string(ev.from)
                          << "->" << to_string(ev.to) << "\n";
            std::cout << "tick=" << engine.simulator().now()
                      << " events=" << events.size()
                      << (engine.quiescent() ? " quiescent" : "") << "\n";
            session.save();
            return kExitOk;
        }
        if (resolveCmd->parsed()) {
            const auto dot = target.find('.');
            const std::string svcName = dot == std::string::npos ? target : target.substr(0, dot);
            const std::string svcNs = dot == std::string::npos ? "default" : target.substr(dot + 1);
            auto addresses = resolve_service(engine.store(), svcName, svcNs);
            if (!addresses) {
                std::cerr << "NXDOMAIN: " << service_fqdn(svcName, svcNs) << "\n";
                return kExitUserError;
            }
            for (const auto& a : *addresses) std::cout << a << "\n";
            return kExitOk;
        }
        if (exportCmd->parsed()) {
            const std::string script = engine.export_script(ns, name);
            fs::create_directories(stateDir + "/scripts");
            const std::string path = stateDir + "/scripts/" + ns + "." + name + ".sbatch";
            write_file(path, script);
            std::cout << path << "\n";
            return kExitOk;
        }
        if (traceCmd->parsed()) {
            std::cout << engine.trace_text();
            return kExitOk;
        }
        if (dumpCmd->parsed()) {
            std::cout << engine.store().dump().dump(2) << "\n";
            return kExitOk;
        }
    } catch (const NonQuiescent& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEngineError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUserError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitEngineError;
    }
    return kExitOk;
}
