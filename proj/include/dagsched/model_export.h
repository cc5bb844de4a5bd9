#ifndef DAGSCHED_MODEL_EXPORT_H_
#define DAGSCHED_MODEL_EXPORT_H_

#include <map>
#include <string>
#include <vector>

#include "dagsched/common.h"
#include "dagsched/graph.h"
#include "dagsched/schedule.h"

namespace dagsched {

// Solver-neutral text model of either constraint encoding:
//
//   # dagsched model: encoding=improved cores=2 nodes=3 edges=2
//   VARS
//   VAR x_0_0 binary {0,1}
//   VAR s_0_0 real [0,inf)
//   CONSTRAINTS
//   CON Eq.(1) x_0_0 + x_0_1 >= 1
//   CON Eq.(10) x_0_0 = 1 & x_1_0 = 1 -> f_0_0 - s_1_0 <= 0
//   CON Eq.(4) x_0_0 = 1 & x_1_0 = 1 -> f_0_0 - s_1_0 <= 0 | f_1_0 - s_0_0 <= 0
//   CON Eq.(11) earliest_f_0 = min(f_0_0, f_0_1)
//   OBJECTIVE
//   MIN makespan
//
// A constraint is an optional conjunction of binary literals, "->", and a
// disjunction of linear relations with a constant right-hand side; or the
// auxiliary definition "<var> = min(<var>, ...)". Variables: x_v_p (task v
// runs on core p), s_v_p / f_v_p (start / finish), d_a_i_b_j (instance b@j
// reads a@i; Tang only), earliest_f_u (improved only), makespan.

struct ModelVar {
  std::string name;
  std::string kind;    // "binary" or "real"
  std::string domain;  // "{0,1}" or "[0,inf)"
};

struct Term {
  double coef = 1.0;
  std::string var;
};

struct Relation {
  std::vector<Term> lhs;
  std::string op;  // "<=", ">=", "="
  double rhs = 0.0;
};

struct Literal {
  std::string var;
  int value = 1;
};

struct ModelConstraint {
  std::string tag;
  std::vector<Literal> when;       // all must hold for the body to apply
  std::vector<Relation> any_of;    // at least one must hold
  std::string min_target;          // auxiliary "target = min(args)"
  std::vector<std::string> min_args;
};

struct ConstraintModel {
  Encoding encoding = Encoding::kImproved;
  int num_cores = 1;
  int num_nodes = 0;
  int num_edges = 0;
  std::vector<ModelVar> vars;
  std::vector<ModelConstraint> constraints;
  std::string objective = "makespan";

  int count_vars(char prefix) const;
};

// Throws std::invalid_argument for invalid graphs or m < 1.
ConstraintModel build_model(const TaskGraph& graph, int num_cores, Encoding encoding);
std::string model_to_text(const ConstraintModel& model);
// Convenience: model_to_text(build_model(...)). Byte-identical for identical
// inputs.
std::string export_model(const TaskGraph& graph, int num_cores, Encoding encoding);

// Parses model text; throws std::runtime_error with the line number on
// malformed input.
ConstraintModel parse_model(const std::string& text);

using Assignment = std::map<std::string, double>;

// Variable values implied by a schedule (absent instances as in
// check_constraint_semantics; d from choose_producers()).
Assignment assignment_from_schedule(const TaskGraph& graph, const Schedule& sched,
                                    Encoding encoding);
// Reports each constraint the assignment violates (code = the constraint's
// tag) and each variable the model references without a value ("unbound").
Report evaluate_model(const ConstraintModel& model, const Assignment& values);

// "name value" per line, '#' comments; the usual shape of solver output.
Assignment parse_assignment(const std::string& text);
std::string assignment_to_text(const Assignment& values);
// Rebuilds the schedule encoded by x/s values (x >= 0.5 means present).
Schedule schedule_from_assignment(const TaskGraph& graph, int num_cores,
                                  const Assignment& values);

}  // namespace dagsched

#endif  // DAGSCHED_MODEL_EXPORT_H_
