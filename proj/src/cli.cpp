#include "micqp/cli.hpp"

#include <functional>
#include <map>

#include "micqp/diophantine.hpp"

namespace micqp {

namespace {

Json result(const char* status) {
  Json out;
  out["status"] = status;
  return out;
}

InstanceFile objective_instance(const std::string& text, const char* command) {
  InstanceFile f = parse_instance_text(text);
  if (f.quad)
    throw InputError(".quad_constraint", std::string("not supported by '") + command +
                                             "'; use 'feasible' or 'reduce-fulldim'");
  return f;
}

Json solve_output(const SolveResult& r) {
  Json out = result(status_name(r.status));
  Json cert = Json::object();
  switch (r.status) {
    case SolveStatus::Infeasible:
      break;
    case SolveStatus::Unbounded:
      out["x"] = to_json(r.x);
      cert["ray"] = to_json(r.ray);
      break;
    case SolveStatus::Optimal:
      out["x"] = to_json(r.x);
      out["value"] = to_json(r.value);
      if (r.denominator_bound != 0) {
        cert["lower"] = to_json(r.lower);
        cert["denominator_bound"] = r.denominator_bound.get_str();
      }
      break;
  }
  cert["feasibility_calls"] = r.feasibility_calls;
  out["certificates"] = std::move(cert);
  return out;
}

Json cmd_solve(const std::string& text, FeasibilityTrace* trace) {
  const InstanceFile f = objective_instance(text, "solve");
  return solve_output(optimize(f.inst, trace));
}

Json cmd_oracle(const std::string& text, FeasibilityTrace*) {
  const InstanceFile f = objective_instance(text, "oracle");
  return solve_output(oracle_optimize(f.inst));
}

Json cmd_bounded(const std::string& text, FeasibilityTrace* trace) {
  const InstanceFile f = objective_instance(text, "bounded");
  const BoundednessResult b = boundedness(f.inst, trace);
  const char* names[] = {"infeasible", "unbounded", "bounded"};
  Json out = result(names[static_cast<int>(b.status)]);
  Json cert = Json::object();
  if (b.status != SolveStatus::Infeasible) out["x"] = to_json(b.point);
  if (b.status == SolveStatus::Unbounded) cert["ray"] = to_json(b.ray);
  out["certificates"] = std::move(cert);
  return out;
}

Json cmd_feasible(const std::string& text, FeasibilityTrace* trace) {
  const InstanceFile f = parse_instance_text(text);
  const auto x = feasibility(f.feasible_set(), trace);
  Json out = result(x ? "feasible" : "infeasible");
  if (x) out["x"] = to_json(*x);
  out["certificates"] = Json::object();
  return out;
}

Json param_json(const AffineParam& tau) {
  return {{"xbar", to_json(tau.xbar)}, {"M", to_json(tau.M)}, {"n", tau.nPrime}, {"p", tau.pPrime}};
}

Json cmd_reduce(const std::string& text, FeasibilityTrace*) {
  const InstanceFile f = parse_instance_text(text);
  const auto red = fulldim_reduce_cqs(f.feasible_set());
  if (!red) {
    Json out = result("empty");
    out["certificates"] = Json::object();
    return out;
  }
  InstanceFile g;
  g.inst.P = red->reduced.P;
  g.inst.obj = f.inst.obj.substitute(red->tau);
  if (f.quad) g.quad = QuadConstraint{red->reduced.H, red->reduced.h, red->reduced.eta};
  Json out = result("reduced");
  out["instance"] = instance_to_json(g);
  Json tight = Json::array();
  for (auto i : red->tight) tight.push_back(i);
  out["certificates"] = {{"tau", param_json(red->tau)},
                         {"objective_offset", to_json(f.inst.obj(red->tau.xbar))},
                         {"descents", red->descents},
                         {"tight_rows", std::move(tight)}};
  return out;
}

Json cmd_sandwich(const std::string& text, FeasibilityTrace*) {
  const InstanceFile f = parse_instance_text(text);
  const SandwichResult sw = sandwich(f.feasible_set(), f.inst.p());
  Json out = result("ok");
  Json verts = Json::array();
  for (const auto& v : sw.growth.simplex.vertices) verts.push_back(to_json(v));
  Json vols = Json::array();
  for (const auto& v : sw.growth.volumes) vols.push_back(to_string(v));
  out["certificates"] = {{"B", to_json(sw.B)},
                         {"a", to_json(sw.a)},
                         {"r", to_json(sw.r)},
                         {"R", to_json(sw.R)},
                         {"simplex", std::move(verts)},
                         {"volumes", std::move(vols)}};
  return out;
}

Json cmd_flatness(const std::string& text, FeasibilityTrace*) {
  const Json j = parse_json_text(text);
  if (!j.is_object() || !j.contains("B") || !j.contains("a") || !j.contains("r"))
    throw InputError("$", "expected an object with fields a, r, B");
  const RatMatrix B = any_matrix_from_json(j.at("B"), ".B");
  if (B.rows() != B.cols() || B.rows() == 0) throw InputError(".B", "dimension mismatch: expected a nonempty square matrix");
  const RatVector a = vector_from_json(j.at("a"), B.rows(), ".a");
  const Rational r = rational_from_json(j.at("r"), ".r");
  if (sgn(r) < 0) throw InputError(".r", "radius must be non-negative");
  if (sgn(determinant(B)) == 0) throw InputError(".B", "singular basis");
  const FlatnessOutcome o = flatness(a, r, B);
  if (o.kind == FlatnessKind::LatticePoint) {
    Json out = result("lattice_point");
    out["x"] = to_json(o.z);
    out["certificates"] = {{"mu", to_json(o.mu)}};
    return out;
  }
  Json out = result("thin_direction");
  out["x"] = to_json(o.d);
  out["certificates"] = {{"d", to_json(o.d)}, {"BTd", to_json(o.c)}};
  return out;
}

Json cmd_ginv(const std::string& text, FeasibilityTrace*) {
  const Json j = parse_json_text(text);
  if (!j.is_object() || !j.contains("A")) throw InputError("$", "expected an object with field A");
  const RatMatrix A = any_matrix_from_json(j.at("A"), ".A");
  if (A.empty()) throw InputError(".A", "expected a nonempty matrix");
  const IntegerReflexiveGinv g = integer_reflexive_ginv(A);
  const RatMatrix AsA = g.Asharp * A;
  Json out = result("ok");
  out["certificates"] = {{"Asharp", to_json(g.Asharp)},
                         {"U", to_json(g.U.U)},
                         {"Uinv", to_json(g.U.Uinv)},
                         {"rank", g.r},
                         {"checks",
                          {{"A_Asharp_A_equals_A", A * g.Asharp * A == A},
                           {"Asharp_A_Asharp_equals_Asharp", g.Asharp * A * g.Asharp == g.Asharp},
                           {"Asharp_A_integral", AsA.is_integer()}}}};
  return out;
}

using Handler = std::function<Json(const std::string&, FeasibilityTrace*)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"solve", cmd_solve},       {"feasible", cmd_feasible}, {"bounded", cmd_bounded},
      {"reduce-fulldim", cmd_reduce}, {"sandwich", cmd_sandwich}, {"flatness", cmd_flatness},
      {"ginv", cmd_ginv},         {"oracle", cmd_oracle}};
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve",    "feasible", "bounded", "reduce-fulldim",
                                              "sandwich", "flatness", "ginv",    "oracle"};
  return names;
}

CommandOutput run_command(const std::string& command, const std::string& input, bool trace) {
  CommandOutput out;
  const auto it = handlers().find(command);
  if (it == handlers().end()) {
    out.exit_code = 2;
    out.error = "unknown command '" + command + "'";
    return out;
  }
  try {
    FeasibilityTrace t;
    out.result = it->second(input, trace ? &t : nullptr);
    if (trace) out.result["trace"] = trace_to_json(t);
  } catch (const InputError& e) {
    out.exit_code = 2;
    out.error = std::string("input error: ") + e.what();
  } catch (const PreconditionError& e) {
    out.exit_code = 2;
    out.error = std::string("input error: ") + e.what();
  } catch (const Error& e) {
    out.exit_code = 1;
    out.error = std::string("internal error: ") + e.what();
  }
  return out;
}

}  // namespace micqp
