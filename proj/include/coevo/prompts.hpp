#pragma once

#include <map>
#include <string>

namespace coevo::prompts {

// Prompt templates are wire contracts: edits here change what a live model
// sees. Curly braces mark named format slots filled by fill_slots().

inline constexpr const char* kMetaSystem =
    R"(# System
You are the meta-controller of a multi-agent LLM system that solves
a single task instance by evolving its topology and the capabilities
of its agents at inference time.

On every invocation ("slow update"), you receive:
  1. the task description and a running task profile,
  2. the current agent graph as JSON,
  3. fast-round traces per agent (tool calls, critiques, round reward),
  4. the most recent global round scores.

You output a structured JSON object with the following fields:
  - birth_death_pairs: at most 2 pairs (v_dead, v_new_spec)
  - graph_edit: at most 4 (edge_add | edge_remove) operations
  - graph_diff: the implied graph delta, for provenance
  - agent_feedback: per-agent capability deltas (prompt edits, memory seeds)
  - global_rationale: short free-text reasoning, <=3 sentences
  - time_control: one of {continue, slow_again, stop}

Hard constraints:
  - do NOT delete the sink agent;
  - do NOT spawn >2 agents per slow update;
  - do NOT edit >4 edges per slow update;
  - prefer edits that re-route evidence over edits that spawn new roles;
  - if round scores are monotone-improving, choose time_control=continue.
)";

inline constexpr const char* kMetaDeveloper =
    R"(# Developer
Follow this procedure:
  1. Read the task profile and identify the missing evidence slots.
  2. Inspect per-agent reward trajectories. Mark agents with
     reward < 0.2 for possible death; mark evidence slots with no
     assigned agent for possible birth.
  3. If a single agent is handling >2 distinct sub-goals, propose
     splitting via a birth/death pair.
  4. Re-wire edges so each evidence slot has a clear producer ->
     consumer path to the sink.
  5. Emit the JSON output.
)";

inline constexpr const char* kMetaUser =
    R"(# User
Task: {task_description}

Current graph:
{graph_json}

Per-agent fast-round summaries:
{per_agent_summaries}

Recent round scores (oldest to newest):
{round_scores}

Provide the JSON object now.
)";

inline constexpr const char* kAgentSystem =
    R"(# System
You are the {role_name} agent.

Goal: {role_goal}
Constraint: {role_constraint}

You have access to the following tools:
{tool_specs}

Incoming messages (from upstream agents):
{incoming_messages}

Produce an output message that advances the task. If you are a sink
agent, end with a line beginning "Final Answer:".
)";

inline constexpr const char* kSelfReflection =
    R"(# User
You just completed round {round_idx}. Your reward this round was
{reward}. Here is your round output:

{round_output}

In 2-3 sentences, identify ONE concrete capability update (prompt
edit, memory seed, or tool-use change) that would improve your next
round. Return only the update, no apology.
)";

inline constexpr const char* kRubricJudge =
    R"(# User
You are an expert grader. Evaluate a candidate answer using the
rubric below.

Candidate Answer:
"{answer}"

Rubric (JSON checklist):
{rubric_json}

For each rubric item:
  - If operator is "correctness": does the answer satisfy/support the
    criterion? (true/false)
  - If operator is "contradiction": does the answer contradict the
    criterion? (true/false)

Return JSON only:
{"results":[true,false,...]}
)";

inline constexpr const char* kContributionJudge =
    R"(You are an evaluator for multi-agent collaboration. Score how much this agent output
can contribute to solving the task.
Return strict JSON only: {"score": <0~1 float>, "reason": "..."}.
Scoring rubric:
- 0.0: irrelevant/wrong/no useful signal
- 0.3: weak but partially relevant
- 0.5: moderately useful evidence or decomposition
- 0.7: strong useful contribution with concrete progress
- 1.0: critical and directly decisive contribution

{evidence_note}

Task:
{task}

Round Query Given To Agent:
{query}

Agent ID: {agent_id}
Agent Role: {role}

Tools Used: {tool_names}
Evidence Gate Precheck: {precheck}
Agent Output:
{output_for_judge}
)";

/// Replaces each {slot} for which a value is provided; unknown braces are
/// left untouched (the judge templates carry literal JSON braces).
std::string fill_slots(const std::string& tmpl,
                       const std::map<std::string, std::string>& slots);

}  // namespace coevo::prompts
