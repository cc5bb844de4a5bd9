#include "dagsched/model_export.h"

#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dagsched/heuristics.h"

namespace dagsched {

namespace {

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string x(NodeId v, int p) { return "x_" + std::to_string(v) + "_" + std::to_string(p); }
std::string s(NodeId v, int p) { return "s_" + std::to_string(v) + "_" + std::to_string(p); }
std::string f(NodeId v, int p) { return "f_" + std::to_string(v) + "_" + std::to_string(p); }
std::string d(NodeId a, int i, NodeId b, int j) {
  return "d_" + std::to_string(a) + "_" + std::to_string(i) + "_" + std::to_string(b) + "_" +
         std::to_string(j);
}
std::string earliest(NodeId u) { return "earliest_f_" + std::to_string(u); }

Relation rel(std::vector<Term> lhs, const char* op, double rhs) {
  return Relation{std::move(lhs), op, rhs};
}

ModelConstraint con(const char* tag, std::vector<Literal> when, std::vector<Relation> any_of) {
  ModelConstraint c;
  c.tag = tag;
  c.when = std::move(when);
  c.any_of = std::move(any_of);
  return c;
}

double total_wcet(const TaskGraph& graph) {
  double total = 0.0;
  for (const Node& node : graph.nodes()) total += node.wcet;
  return total;
}

std::string trim(const std::string& text) {
  const auto b = text.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = text.find_last_not_of(" \t\r");
  return text.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, const std::string& sep) {
  std::vector<std::string> out;
  size_t pos = 0;
  for (;;) {
    const size_t next = text.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(trim(text.substr(pos)));
      return out;
    }
    out.push_back(trim(text.substr(pos, next - pos)));
    pos = next + sep.size();
  }
}

double parse_number(const std::string& token) {
  size_t used = 0;
  const double value = std::stod(token, &used);
  if (used != token.size()) throw std::invalid_argument("bad number '" + token + "'");
  return value;
}

Relation parse_relation(const std::string& text) {
  static const char* kOps[] = {"<=", ">=", "="};
  for (const char* op : kOps) {
    const size_t at = text.find(op);
    if (at == std::string::npos) continue;
    Relation r;
    r.op = op;
    r.rhs = parse_number(trim(text.substr(at + std::string(op).size())));
    std::istringstream lhs(text.substr(0, at));
    std::string token;
    double sign = 1.0;
    while (lhs >> token) {
      if (token == "+") {
        sign = 1.0;
      } else if (token == "-") {
        sign = -1.0;
      } else {
        Term term;
        const size_t star = token.find('*');
        if (star == std::string::npos) {
          term.var = token;
          if (token.size() > 1 && token[0] == '-') {
            term.coef = -1.0;
            term.var = token.substr(1);
          }
        } else {
          term.coef = parse_number(token.substr(0, star));
          term.var = token.substr(star + 1);
        }
        term.coef *= sign;
        sign = 1.0;
        r.lhs.push_back(term);
      }
    }
    if (r.lhs.empty()) throw std::invalid_argument("relation without variables");
    return r;
  }
  throw std::invalid_argument("no relational operator in '" + text + "'");
}

std::string relation_to_text(const Relation& r) {
  std::string out;
  for (size_t i = 0; i < r.lhs.size(); ++i) {
    const Term& t = r.lhs[i];
    double c = t.coef;
    if (i > 0) {
      out += c < 0 ? " - " : " + ";
      c = std::fabs(c);
    } else if (c < 0) {
      out += "-";
      c = -c;
    }
    if (c != 1.0) out += fmt(c) + "*";
    out += t.var;
  }
  return out + " " + r.op + " " + fmt(r.rhs);
}

}  // namespace

int ConstraintModel::count_vars(char prefix) const {
  int count = 0;
  for (const ModelVar& v : vars)
    count += v.name.size() > 1 && v.name[0] == prefix && v.name[1] == '_';
  return count;
}

ConstraintModel build_model(const TaskGraph& graph, int num_cores, Encoding encoding) {
  require_schedulable(graph, num_cores);
  const int n = graph.num_nodes();
  const int m = num_cores;
  const NodeId sink = graph.sink();
  const double total = total_wcet(graph);

  ConstraintModel model;
  model.encoding = encoding;
  model.num_cores = m;
  model.num_nodes = n;
  model.num_edges = graph.num_edges();

  auto real = [&](std::string name) { model.vars.push_back({std::move(name), "real", "[0,inf)"}); };
  auto binary = [&](std::string name) { model.vars.push_back({std::move(name), "binary", "{0,1}"}); };
  for (NodeId v = 0; v < n; ++v)
    for (int p = 0; p < m; ++p) binary(x(v, p));
  for (NodeId v = 0; v < n; ++v)
    for (int p = 0; p < m; ++p) real(s(v, p));
  for (NodeId v = 0; v < n; ++v)
    for (int p = 0; p < m; ++p) real(f(v, p));
  if (encoding == Encoding::kTang) {
    for (const Edge& e : graph.edges())
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) binary(d(e.src, i, e.dst, j));
  } else {
    for (NodeId u = 0; u < n; ++u)
      if (!graph.children(u).empty()) real(earliest(u));
  }
  real("makespan");

  auto& cons = model.constraints;
  // Eq. (1): at least one instance per task.
  for (NodeId v = 0; v < n; ++v) {
    std::vector<Term> sum;
    for (int p = 0; p < m; ++p) sum.push_back({1.0, x(v, p)});
    cons.push_back(con("Eq.(1)", {}, {rel(sum, ">=", 1)}));
  }
  if (encoding == Encoding::kTang) {
    // Eq. (2): f = s + t x.
    for (NodeId v = 0; v < n; ++v)
      for (int p = 0; p < m; ++p)
        cons.push_back(con("Eq.(2)", {},
                           {rel({{1.0, f(v, p)}, {-1.0, s(v, p)}, {-graph.wcet(v), x(v, p)}},
                                "=", 0)}));
  }
  // Eq. (3): absent instances start at 0.
  for (NodeId v = 0; v < n; ++v)
    for (int p = 0; p < m; ++p)
      cons.push_back(con("Eq.(3)", {{x(v, p), 0}}, {rel({{1.0, s(v, p)}}, "=", 0)}));
  // Eq. (4): one task at a time per core.
  for (int p = 0; p < m; ++p)
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b)
        cons.push_back(con("Eq.(4)", {{x(a, p), 1}, {x(b, p), 1}},
                           {rel({{1.0, f(a, p)}, {-1.0, s(b, p)}}, "<=", 0),
                            rel({{1.0, f(b, p)}, {-1.0, s(a, p)}}, "<=", 0)}));
  // Eq. (6): the sink runs exactly once.
  {
    std::vector<Term> sum;
    for (int p = 0; p < m; ++p) sum.push_back({1.0, x(sink, p)});
    cons.push_back(con("Eq.(6)", {}, {rel(sum, "=", 1)}));
  }

  if (encoding == Encoding::kTang) {
    for (const Edge& e : graph.edges()) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          // Eq. (5): data from the chosen source arrives before the start.
          const double w = i == j ? 0.0 : e.cost;
          cons.push_back(con("Eq.(5)", {{d(e.src, i, e.dst, j), 1}},
                             {rel({{1.0, f(e.src, i)}, {-1.0, s(e.dst, j)}}, "<=", w == 0.0 ? 0.0 : -w)}));
          // Eq. (8): a source must exist to be chosen.
          cons.push_back(con("Eq.(8)", {},
                             {rel({{1.0, d(e.src, i, e.dst, j)}, {-1.0, x(e.src, i)}}, "<=", 0)}));
        }
      }
    }
    // Eq. (7): each instance of a non-sink task feeds some consumer.
    for (NodeId a = 0; a < n; ++a) {
      if (graph.children(a).empty()) continue;
      for (int i = 0; i < m; ++i) {
        std::vector<Term> sum;
        for (NodeId b : graph.children(a))
          for (int j = 0; j < m; ++j) sum.push_back({1.0, d(a, i, b, j)});
        cons.push_back(con("Eq.(7)", {{x(a, i), 1}}, {rel(sum, ">=", 1)}));
      }
    }
    // Eq. (8): each consumer instance reads each input from one source.
    for (const Edge& e : graph.edges()) {
      for (int j = 0; j < m; ++j) {
        std::vector<Term> sum;
        for (int i = 0; i < m; ++i) sum.push_back({1.0, d(e.src, i, e.dst, j)});
        cons.push_back(con("Eq.(8)", {{x(e.dst, j), 1}}, {rel(sum, "=", 1)}));
      }
    }
  } else {
    // Eq. (9): no more instances than children.
    for (NodeId v = 0; v < n; ++v) {
      const auto children = graph.children(v);
      if (children.empty()) continue;
      std::vector<Term> sum;
      for (int p = 0; p < m; ++p) sum.push_back({1.0, x(v, p)});
      cons.push_back(con("Eq.(9)", {}, {rel(sum, "<=", static_cast<double>(children.size()))}));
    }
    for (NodeId u = 0; u < n; ++u) {
      if (graph.children(u).empty()) continue;
      ModelConstraint aux;
      aux.tag = "Eq.(11)";
      aux.min_target = earliest(u);
      for (int p = 0; p < m; ++p) aux.min_args.push_back(f(u, p));
      cons.push_back(std::move(aux));
    }
    for (const Edge& e : graph.edges()) {
      for (int i = 0; i < m; ++i) {
        // Eq. (10): same-core precedence.
        cons.push_back(con("Eq.(10)", {{x(e.src, i), 1}, {x(e.dst, i), 1}},
                           {rel({{1.0, f(e.src, i)}, {-1.0, s(e.dst, i)}}, "<=", 0)}));
        // Eq. (11): remote precedence through the earliest instance.
        cons.push_back(con("Eq.(11)", {{x(e.src, i), 0}, {x(e.dst, i), 1}},
                           {rel({{1.0, earliest(e.src)}, {-1.0, s(e.dst, i)}}, "<=", e.cost == 0.0 ? 0.0 : -e.cost)}));
      }
    }
    for (NodeId v = 0; v < n; ++v) {
      for (int p = 0; p < m; ++p) {
        // Eq. (12): finish = start + WCET for present instances.
        cons.push_back(con("Eq.(12)", {{x(v, p), 1}},
                           {rel({{1.0, f(v, p)}, {-1.0, s(v, p)}}, "=", graph.wcet(v))}));
        // Eq. (13): absent instances finish at the sum of all WCETs.
        cons.push_back(con("Eq.(13)", {{x(v, p), 0}}, {rel({{1.0, f(v, p)}}, "=", total)}));
      }
    }
  }
  // The makespan covers every present instance.
  for (NodeId v = 0; v < n; ++v)
    for (int p = 0; p < m; ++p)
      cons.push_back(con("makespan", {{x(v, p), 1}},
                         {rel({{1.0, "makespan"}, {-1.0, f(v, p)}}, ">=", 0)}));
  return model;
}

std::string model_to_text(const ConstraintModel& model) {
  std::ostringstream out;
  out << "# dagsched model: encoding=" << encoding_name(model.encoding)
      << " cores=" << model.num_cores << " nodes=" << model.num_nodes
      << " edges=" << model.num_edges << "\n";
  out << "VARS\n";
  for (const ModelVar& v : model.vars) out << "VAR " << v.name << " " << v.kind << " " << v.domain << "\n";
  out << "CONSTRAINTS\n";
  for (const ModelConstraint& c : model.constraints) {
    out << "CON " << c.tag << " ";
    if (!c.min_target.empty()) {
      out << c.min_target << " = min(";
      for (size_t i = 0; i < c.min_args.size(); ++i) out << (i ? ", " : "") << c.min_args[i];
      out << ")\n";
      continue;
    }
    for (size_t i = 0; i < c.when.size(); ++i) {
      out << (i ? " & " : "") << c.when[i].var << " = " << c.when[i].value;
    }
    if (!c.when.empty()) out << " -> ";
    for (size_t i = 0; i < c.any_of.size(); ++i) {
      out << (i ? " | " : "") << relation_to_text(c.any_of[i]);
    }
    out << "\n";
  }
  out << "OBJECTIVE\nMIN " << model.objective << "\n";
  return out.str();
}

std::string export_model(const TaskGraph& graph, int num_cores, Encoding encoding) {
  return model_to_text(build_model(graph, num_cores, encoding));
}

ConstraintModel parse_model(const std::string& text) {
  ConstraintModel model;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  enum { kNone, kVars, kCons, kObjective } section = kNone;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    try {
      if (t.empty()) continue;
      if (t[0] == '#') {
        std::istringstream header(t.substr(1));
        std::string token;
        while (header >> token) {
          const size_t eq = token.find('=');
          if (eq == std::string::npos) continue;
          const std::string key = token.substr(0, eq);
          const std::string value = token.substr(eq + 1);
          if (key == "encoding") model.encoding = parse_encoding(value);
          if (key == "cores") model.num_cores = std::stoi(value);
          if (key == "nodes") model.num_nodes = std::stoi(value);
          if (key == "edges") model.num_edges = std::stoi(value);
        }
        continue;
      }
      if (t == "VARS") { section = kVars; continue; }
      if (t == "CONSTRAINTS") { section = kCons; continue; }
      if (t == "OBJECTIVE") { section = kObjective; continue; }
      std::istringstream words(t);
      std::string keyword;
      words >> keyword;
      if (section == kVars && keyword == "VAR") {
        ModelVar v;
        if (!(words >> v.name >> v.kind >> v.domain)) throw std::invalid_argument("VAR needs name kind domain");
        model.vars.push_back(v);
      } else if (section == kCons && keyword == "CON") {
        ModelConstraint c;
        words >> c.tag;
        std::string body;
        std::getline(words, body);
        body = trim(body);
        const size_t min_at = body.find("= min(");
        if (min_at != std::string::npos) {
          c.min_target = trim(body.substr(0, min_at));
          const size_t open = body.find('(', min_at);
          const size_t close = body.rfind(')');
          if (close == std::string::npos || close < open) throw std::invalid_argument("unclosed min(");
          for (const std::string& arg : split(body.substr(open + 1, close - open - 1), ","))
            c.min_args.push_back(arg);
        } else {
          std::string rhs = body;
          const size_t arrow = body.find("->");
          if (arrow != std::string::npos) {
            for (const std::string& lit : split(body.substr(0, arrow), "&")) {
              const size_t eq = lit.find('=');
              if (eq == std::string::npos) throw std::invalid_argument("literal needs '='");
              c.when.push_back({trim(lit.substr(0, eq)), std::stoi(trim(lit.substr(eq + 1)))});
            }
            rhs = body.substr(arrow + 2);
          }
          for (const std::string& part : split(rhs, "|")) c.any_of.push_back(parse_relation(part));
        }
        model.constraints.push_back(std::move(c));
      } else if (section == kObjective && keyword == "MIN") {
        words >> model.objective;
      } else {
        throw std::invalid_argument("unexpected '" + keyword + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("model line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return model;
}

Assignment assignment_from_schedule(const TaskGraph& graph, const Schedule& sched,
                                    Encoding encoding) {
  const int n = graph.num_nodes();
  const int m = sched.num_cores();
  const double absent_f = encoding == Encoding::kTang ? 0.0 : total_wcet(graph);
  Assignment values;
  for (NodeId v = 0; v < n; ++v) {
    for (int p = 0; p < m; ++p) {
      values[x(v, p)] = 0;
      values[s(v, p)] = 0;
      values[f(v, p)] = absent_f;
    }
  }
  for (int c = 0; c < m; ++c) {
    for (const Placement& p : sched.core(c)) {
      if (p.node < 0 || p.node >= n) continue;
      values[x(p.node, c)] = 1;
      values[s(p.node, c)] = p.start;
      values[f(p.node, c)] = p.finish;
    }
  }
  if (encoding == Encoding::kTang) {
    for (const Edge& e : graph.edges())
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) values[d(e.src, i, e.dst, j)] = 0;
    const CommResolution res = choose_producers(graph, sched);
    for (int c = 0; c < m; ++c)
      for (size_t k = 0; k < sched.core(c).size(); ++k)
        for (const CommLink& link : res.links[c][k])
          if (link.producer.valid())
            values[d(link.parent, link.producer.core, sched.core(c)[k].node, c)] = 1;
  } else {
    for (NodeId u = 0; u < n; ++u) {
      if (graph.children(u).empty()) continue;
      double best = std::numeric_limits<double>::infinity();
      for (int p = 0; p < m; ++p) best = std::min(best, values[f(u, p)]);
      values[earliest(u)] = best;
    }
  }
  values["makespan"] = sched.makespan();
  return values;
}

Report evaluate_model(const ConstraintModel& model, const Assignment& values) {
  Report report;
  std::vector<std::string> unbound;
  auto value = [&](const std::string& name, bool& ok) {
    const auto it = values.find(name);
    if (it == values.end()) {
      ok = false;
      unbound.push_back(name);
      return 0.0;
    }
    return it->second;
  };

  for (const ModelConstraint& c : model.constraints) {
    bool ok = true;
    if (!c.min_target.empty()) {
      double best = std::numeric_limits<double>::infinity();
      for (const std::string& arg : c.min_args) best = std::min(best, value(arg, ok));
      const double target = value(c.min_target, ok);
      if (ok && !time_eq(target, best)) {
        report.push_back({c.tag, c.min_target + " = " + fmt(target) + " but min is " + fmt(best)});
      }
      continue;
    }
    bool applies = true;
    for (const Literal& lit : c.when) {
      const double v = value(lit.var, ok);
      applies = applies && std::fabs(v - lit.value) < 0.5;
    }
    if (!ok || !applies) continue;
    bool holds = false;
    std::string shown;
    for (const Relation& r : c.any_of) {
      double lhs = 0.0;
      double scale = std::fabs(r.rhs);
      for (const Term& t : r.lhs) {
        const double v = value(t.var, ok);
        lhs += t.coef * v;
        scale = std::max(scale, std::fabs(t.coef * v));
      }
      // Tolerance relative to the magnitudes being differenced.
      const double tol = kTimeEps + 1e-12 * scale;
      if (r.op == "<=") holds = holds || lhs <= r.rhs + tol;
      if (r.op == ">=") holds = holds || lhs >= r.rhs - tol;
      if (r.op == "=") holds = holds || std::fabs(lhs - r.rhs) <= tol;
      if (!shown.empty()) shown += " | ";
      shown += relation_to_text(r) + " (lhs " + fmt(lhs) + ")";
    }
    if (ok && !holds) report.push_back({c.tag, shown});
  }
  std::sort(unbound.begin(), unbound.end());
  unbound.erase(std::unique(unbound.begin(), unbound.end()), unbound.end());
  for (const std::string& name : unbound) report.push_back({"unbound", "no value for " + name});
  return report;
}

Assignment parse_assignment(const std::string& text) {
  Assignment values;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream words(t);
    std::string name, number, extra;
    if (!(words >> name >> number) || (words >> extra)) {
      throw std::runtime_error("assignment line " + std::to_string(line_no) +
                               ": expected '<name> <value>'");
    }
    try {
      values[name] = parse_number(number);
    } catch (const std::exception& e) {
      throw std::runtime_error("assignment line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return values;
}

std::string assignment_to_text(const Assignment& values) {
  std::string out;
  for (const auto& [name, value] : values) out += name + " " + fmt(value) + "\n";
  return out;
}

Schedule schedule_from_assignment(const TaskGraph& graph, int num_cores,
                                  const Assignment& values) {
  std::vector<std::vector<Placement>> lists(num_cores);
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    for (int p = 0; p < num_cores; ++p) {
      const auto it = values.find(x(v, p));
      if (it == values.end() || it->second < 0.5) continue;
      const auto st = values.find(s(v, p));
      if (st == values.end()) throw std::runtime_error("assignment lacks " + s(v, p));
      lists[p].push_back({v, p, st->second, st->second + graph.wcet(v)});
    }
  }
  return Schedule(num_cores, std::move(lists));
}

}  // namespace dagsched
