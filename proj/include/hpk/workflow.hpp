#pragma once

#include <map>
#include <string>
#include <vector>

#include "hpk/model.hpp"
#include "hpk/store.hpp"

namespace hpk {

// One concrete step of a possibly fanned-out task.
struct ConcreteStep {
    std::string stepName;  // "<task>(<index>:<item>)", or the task name itself
    std::map<std::string, std::string> bindings;  // parameter name -> value
};

// withItems fan-out: one step per item with {{item}} bound in the task's
// parameter value expressions; a task without withItems yields one step.
// An empty withItems list yields zero steps (vacuous success).
std::vector<ConcreteStep> expand_with_items(const DagTask& task);

// Replaces every {{inputs.parameters.X}} in the template's annotations,
// command, and args. Throws UnboundParameter for a declared-but-unbound
// parameter and UndeclaredPlaceholder for a referenced-but-undeclared one.
PodResource substitute_parameters(const PodTemplate& tmpl,
                                  const std::map<std::string, std::string>& bindings);

// Level-triggered DAG controller: expands tasks, submits pods for tasks whose
// dependencies all succeeded, mirrors pod phases into step records, and
// finalizes the workflow phase. All state lives in the stored
// WorkflowResource status, so the controller itself is stateless.
class WorkflowController {
public:
    explicit WorkflowController(Store& store) : store_(store) {}

    // One pass over all stored workflows; returns true if anything changed.
    bool pump();

private:
    Store& store_;

    bool reconcile_workflow(const WorkflowResource& wf);
};

}  // namespace hpk
