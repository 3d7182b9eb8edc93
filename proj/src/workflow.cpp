#include "hpk/workflow.hpp"

#include <algorithm>
#include <cctype>

#include "hpk/errors.hpp"
#include "hpk/manifest.hpp"

namespace hpk {

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

constexpr const char* kParamPrefix = "inputs.parameters.";

std::string substitute_string(const std::string& text,
                              const std::map<std::string, std::string>& bindings,
                              const std::vector<std::string>& declared) {
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t open = text.find("{{", pos);
        if (open == std::string::npos) {
            out += text.substr(pos);
            break;
        }
        std::size_t close = text.find("}}", open);
        if (close == std::string::npos) {
            out += text.substr(pos);
            break;
        }
        out += text.substr(pos, open - pos);
        const std::string ref = text.substr(open + 2, close - open - 2);
        if (!ref.starts_with(kParamPrefix))
            throw UndeclaredPlaceholder("{{" + ref + "}}");
        const std::string name = ref.substr(std::string(kParamPrefix).size());
        if (std::find(declared.begin(), declared.end(), name) == declared.end())
            throw UndeclaredPlaceholder(name);
        auto it = bindings.find(name);
        if (it == bindings.end()) throw UnboundParameter(name);
        out += it->second;
        pos = close + 2;
    }
    return out;
}

std::string sanitize_pod_name(std::string name) {
    for (char& c : name) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '-';
    }
    return name;
}

bool step_terminal(StepPhase p) {
    return p == StepPhase::Succeeded || p == StepPhase::Failed || p == StepPhase::Skipped;
}

}  // namespace

std::vector<ConcreteStep> expand_with_items(const DagTask& task) {
    std::vector<ConcreteStep> steps;
    if (!task.withItems) {
        ConcreteStep step;
        step.stepName = task.name;
        for (const auto& p : task.parameters) step.bindings[p.name] = p.value;
        steps.push_back(std::move(step));
        return steps;
    }
    int index = 0;
    for (const auto& item : *task.withItems) {
        ConcreteStep step;
        step.stepName = task.name + "(" + std::to_string(index) + ":" + item + ")";
        for (const auto& p : task.parameters)
            step.bindings[p.name] = replace_all(p.value, "{{item}}", item);
        steps.push_back(std::move(step));
        ++index;
    }
    return steps;  // empty withItems: zero steps, vacuous success
}

PodResource substitute_parameters(const PodTemplate& tmpl,
                                  const std::map<std::string, std::string>& bindings) {
    for (const auto& declared : tmpl.inputParameters) {
        if (!bindings.contains(declared)) throw UnboundParameter(declared);
    }

    PodResource pod;
    for (const auto& [key, value] : tmpl.annotations)
        pod.meta.annotations[key] = substitute_string(value, bindings, tmpl.inputParameters);
    pod.restartPolicy = RestartPolicy::Never;
    ContainerSpec container = tmpl.container;
    for (auto& word : container.command)
        word = substitute_string(word, bindings, tmpl.inputParameters);
    for (auto& word : container.args)
        word = substitute_string(word, bindings, tmpl.inputParameters);
    pod.containers.push_back(std::move(container));
    return pod;
}

bool WorkflowController::pump() {
    bool any = false;
    for (;;) {
        bool changed = false;
        for (const auto& obj : store_.list("Workflow")) {
            if (reconcile_workflow(std::get<WorkflowResource>(obj.body))) changed = true;
        }
        if (!changed) break;
        any = true;
    }
    return any;
}

bool WorkflowController::reconcile_workflow(const WorkflowResource& stored) {
    if (stored.status.phase == WorkflowPhase::Succeeded ||
        stored.status.phase == WorkflowPhase::Failed)
        return false;

    WorkflowResource wf = stored;

    const WorkflowTemplate* entry = nullptr;
    for (const auto& t : wf.templates)
        if (t.name == wf.entrypoint) entry = &t;

    // First pass: validate and expand every task into step records.
    if (wf.status.steps.empty() && wf.status.phase == WorkflowPhase::Pending) {
        auto violations = validate_workflow(wf);
        if (!violations.empty()) {
            wf.status.phase = WorkflowPhase::Failed;
            wf.status.message = violations.front();
            return store_.put(wf).changed;
        }
        std::vector<DagTask> tasks;
        if (entry->dag) {
            tasks = *entry->dag;
        } else {
            DagTask single;
            single.name = entry->name;
            single.templateRef = entry->name;
            tasks.push_back(std::move(single));
        }
        for (const auto& task : tasks) {
            for (const auto& step : expand_with_items(task)) {
                StepRecord rec;
                rec.task = task.name;
                rec.stepName = step.stepName;
                wf.status.steps.push_back(std::move(rec));
            }
        }
        if (wf.status.steps.empty()) {
            wf.status.phase = WorkflowPhase::Succeeded;  // empty DAG, vacuous
            return store_.put(wf).changed;
        }
        wf.status.phase = WorkflowPhase::Running;
        return store_.put(wf).changed;
    }

    // Mirror pod phases into submitted steps.
    for (auto& step : wf.status.steps) {
        if (step.podName.empty() || step_terminal(step.phase)) continue;
        auto pod = store_.get({"Pod", wf.meta.ns, step.podName});
        if (!pod) {
            step.phase = StepPhase::Failed;
            continue;
        }
        switch (std::get<PodResource>(pod->body).status.phase) {
            case PodPhase::Pending: step.phase = StepPhase::Pending; break;
            case PodPhase::Running: step.phase = StepPhase::Running; break;
            case PodPhase::Succeeded: step.phase = StepPhase::Succeeded; break;
            case PodPhase::Failed: step.phase = StepPhase::Failed; break;
        }
    }

    const bool anyFailed = std::any_of(wf.status.steps.begin(), wf.status.steps.end(),
                                       [](const StepRecord& s) {
                                           return s.phase == StepPhase::Failed;
                                       });

    std::vector<DagTask> tasks;
    if (entry->dag) {
        tasks = *entry->dag;
    } else {
        DagTask single;
        single.name = entry->name;
        single.templateRef = entry->name;
        tasks.push_back(std::move(single));
    }

    auto task_succeeded = [&](const std::string& taskName) {
        bool all = true;
        for (const auto& s : wf.status.steps)
            if (s.task == taskName && s.phase != StepPhase::Succeeded) all = false;
        return all;  // vacuously true for zero-step (empty withItems) tasks
    };

    if (anyFailed) {
        // Fail-fast: nothing new starts; unsubmitted steps are skipped.
        for (auto& step : wf.status.steps)
            if (step.phase == StepPhase::Waiting) step.phase = StepPhase::Skipped;
        wf.status.phase = WorkflowPhase::Failed;
        wf.status.message = "step failed";
        return store_.put(wf).changed;
    }

    // Submit steps of every task whose dependencies have all succeeded.
    for (const auto& task : tasks) {
        bool ready = std::all_of(task.dependencies.begin(), task.dependencies.end(),
                                 task_succeeded);
        if (!ready) continue;

        const WorkflowTemplate* tmpl = nullptr;
        for (const auto& t : wf.templates)
            if (t.name == task.templateRef) tmpl = &t;
        auto expanded = expand_with_items(task);
        std::size_t stepIdx = 0;
        for (auto& step : wf.status.steps) {
            if (step.task != task.name) continue;
            const ConcreteStep& concrete = expanded[stepIdx++];
            if (step.phase != StepPhase::Waiting) continue;
            if (!tmpl || !tmpl->pod) {
                step.phase = StepPhase::Failed;
                wf.status.message = "task " + task.name + ": template \"" +
                                    task.templateRef + "\" is not a container template";
                continue;
            }
            try {
                PodResource pod = substitute_parameters(*tmpl->pod, concrete.bindings);
                pod.meta.ns = wf.meta.ns;
                pod.meta.name = sanitize_pod_name(wf.meta.name + "-" + task.name + "-" +
                                                  std::to_string(stepIdx - 1));
                pod.meta.labels["workflow"] = wf.meta.name;
                store_.put(pod);
                step.podName = pod.meta.name;
                step.phase = StepPhase::Pending;
            } catch (const Error& e) {
                step.phase = StepPhase::Failed;
                wf.status.message = std::string("step ") + step.stepName + ": " + e.what();
            }
        }
    }

    const bool allSucceeded = std::all_of(wf.status.steps.begin(), wf.status.steps.end(),
                                          [](const StepRecord& s) {
                                              return s.phase == StepPhase::Succeeded;
                                          });
    if (allSucceeded) wf.status.phase = WorkflowPhase::Succeeded;

    return store_.put(wf).changed;
}

}  // namespace hpk
