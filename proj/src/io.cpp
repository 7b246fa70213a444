#include "micqp/io.hpp"

#include <fstream>
#include <sstream>

namespace micqp {

InputError::InputError(const std::string& path_, const std::string& reason_)
    : Error(path_ + ": " + reason_), path(path_), reason(reason_) {}

ConvexQuadraticSet InstanceFile::feasible_set() const {
  Polyhedron P = inst.constrained();
  if (!quad) return ConvexQuadraticSet::from_polyhedron(std::move(P));
  return {std::move(P), quad->H, quad->h, quad->eta};
}

Rational rational_from_json(const Json& j, const std::string& path) {
  std::string text;
  if (j.is_string())
    text = j.get<std::string>();
  else if (j.is_number_integer())
    text = j.dump();
  else
    throw InputError(path, "malformed rational: expected an integer or an \"a/b\" string");
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    throw InputError(path, e.what());
  }
}

RatVector vector_from_json(const Json& j, std::size_t len, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "expected an array");
  if (j.size() != len)
    throw InputError(path, "dimension mismatch: expected length " + std::to_string(len) + ", got " +
                               std::to_string(j.size()));
  RatVector out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i)
    out.push_back(rational_from_json(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

RatMatrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "expected an array of rows");
  if (j.size() != rows)
    throw InputError(path, "dimension mismatch: expected " + std::to_string(rows) + " rows, got " +
                               std::to_string(j.size()));
  RatMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const RatVector r = vector_from_json(j[i], cols, path + "[" + std::to_string(i) + "]");
    for (std::size_t k = 0; k < cols; ++k) out(i, k) = r[k];
  }
  return out;
}

RatMatrix any_matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "expected an array of rows");
  if (j.empty()) return RatMatrix();
  if (!j[0].is_array()) throw InputError(path + "[0]", "expected an array");
  return matrix_from_json(j, j.size(), j[0].size(), path);
}

Json to_json(const Rational& q) { return to_string(q); }

Json to_json(std::span<const Rational> v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

Json to_json(const RatMatrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(to_json(m.row(i)));
  return out;
}

namespace {

std::size_t nat_from_json(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw InputError(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw InputError(path + "." + key, "missing field");
  return obj.at(key);
}

void check_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  if (!obj.is_object()) throw InputError(path.empty() ? "$" : path, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw InputError(path + "." + k, "unknown field");
  }
}

RatMatrix psd_matrix(const Json& j, std::size_t n, const std::string& path) {
  RatMatrix H = matrix_from_json(j, n, n, path);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r + 1; c < n; ++c)
      if (H(r, c) != H(c, r))
        throw InputError(path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                         "asymmetric H: differs from entry [" + std::to_string(c) + "][" +
                             std::to_string(r) + "]");
  const PsdCheck chk = check_psd(H);
  if (!chk.psd) throw InputError(path, NotPsdError(chk).what());
  return H;
}

}  // namespace

InstanceFile parse_instance(const Json& j) {
  check_keys(j, {"n", "p", "W", "w", "objective", "quad_constraint", "box"}, "");
  InstanceFile out;
  const std::size_t n = nat_from_json(field(j, "n", ""), ".n");
  const std::size_t p = nat_from_json(field(j, "p", ""), ".p");
  if (p > n) throw InputError(".p", "dimension mismatch: p exceeds n");
  const Json& Wj = field(j, "W", "");
  if (!Wj.is_array()) throw InputError(".W", "expected an array of rows");
  const RatMatrix W = matrix_from_json(Wj, Wj.size(), n, ".W");
  const RatVector w = vector_from_json(field(j, "w", ""), W.rows(), ".w");
  out.inst.P = Polyhedron(W, w, p);

  const Json& obj = field(j, "objective", "");
  check_keys(obj, {"H", "h"}, ".objective");
  out.inst.obj.H = psd_matrix(field(obj, "H", ".objective"), n, ".objective.H");
  out.inst.obj.h = vector_from_json(field(obj, "h", ".objective"), n, ".objective.h");

  if (j.contains("quad_constraint")) {
    const Json& qc = j.at("quad_constraint");
    check_keys(qc, {"H", "h", "eta"}, ".quad_constraint");
    QuadConstraint q;
    q.H = psd_matrix(field(qc, "H", ".quad_constraint"), n, ".quad_constraint.H");
    q.h = vector_from_json(field(qc, "h", ".quad_constraint"), n, ".quad_constraint.h");
    q.eta = rational_from_json(field(qc, "eta", ".quad_constraint"), ".quad_constraint.eta");
    out.quad = std::move(q);
  }
  if (j.contains("box")) {
    const Json& bj = j.at("box");
    check_keys(bj, {"lo", "hi"}, ".box");
    const Json& lo = field(bj, "lo", ".box");
    if (!lo.is_array()) throw InputError(".box.lo", "expected an array");
    const std::size_t k = lo.size();
    if (k < p || k > n)
      throw InputError(".box.lo", "dimension mismatch: box length must lie between p and n");
    Box b{vector_from_json(lo, k, ".box.lo"), vector_from_json(field(bj, "hi", ".box"), k, ".box.hi")};
    for (std::size_t i = 0; i < k; ++i)
      if (b.lo[i] > b.hi[i]) throw InputError(".box.hi[" + std::to_string(i) + "]", "below the lower bound");
    out.inst.box = std::move(b);
  }
  return out;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError("$", std::string("invalid JSON: ") + e.what());
  }
}

InstanceFile parse_instance_text(const std::string& text) { return parse_instance(parse_json_text(text)); }

Json instance_to_json(const InstanceFile& f) {
  Json out;
  out["n"] = f.inst.n();
  out["p"] = f.inst.p();
  out["W"] = to_json(f.inst.P.W);
  out["w"] = to_json(f.inst.P.w);
  out["objective"] = {{"H", to_json(f.inst.obj.H)}, {"h", to_json(f.inst.obj.h)}};
  if (f.quad)
    out["quad_constraint"] = {{"H", to_json(f.quad->H)}, {"h", to_json(f.quad->h)}, {"eta", to_json(f.quad->eta)}};
  if (f.inst.box) out["box"] = {{"lo", to_json(f.inst.box->lo)}, {"hi", to_json(f.inst.box->hi)}};
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Unbounded:
      return "unbounded";
    case SolveStatus::Optimal:
      return "optimal";
  }
  return "unknown";
}

Json trace_to_json(const FeasibilityTrace& t) {
  static const char* kinds[] = {"empty", "continuous", "lattice_point", "branch", "radius"};
  Json events = Json::array();
  for (const auto& e : t.events) {
    Json ev;
    ev["kind"] = kinds[static_cast<int>(e.kind)];
    ev["depth"] = e.depth;
    ev["n"] = e.n;
    ev["p"] = e.p;
    ev["descents"] = e.descents;
    ev["expansions"] = e.expansions;
    if (e.kind == TraceEvent::Kind::Branch) {
      ev["band"] = {{"lo", e.band_lo.get_str()}, {"hi", e.band_hi.get_str()},
                    {"count", e.band_count}, {"limit", e.band_limit}};
    }
    if (e.kind == TraceEvent::Kind::Radius) ev["radius"] = e.radius.get_str();
    events.push_back(std::move(ev));
  }
  Json out;
  out["max_depth"] = t.max_depth;
  out["events"] = std::move(events);
  out["warnings"] = t.warnings;
  return out;
}

}  // namespace micqp
