#pragma once

// JSON instance files and result emitters. Rationals travel as "a/b" or integer strings.

#include <json.hpp>

#include <optional>
#include <string>

#include "micqp/solver.hpp"

namespace micqp {

using Json = nlohmann::ordered_json;

/// Malformed input; the message starts with the JSON path of the offending value.
class InputError : public Error {
 public:
  InputError(const std::string& path, const std::string& reason);
  std::string path;
  std::string reason;
};

struct QuadConstraint {
  RatMatrix H;
  RatVector h;
  Rational eta;
  friend bool operator==(const QuadConstraint&, const QuadConstraint&) = default;
};

struct InstanceFile {
  MicqpInstance inst;
  std::optional<QuadConstraint> quad;

  /// P (with the box) cut by the quadratic constraint, or P alone with a zero quadratic.
  ConvexQuadraticSet feasible_set() const;
  friend bool operator==(const InstanceFile&, const InstanceFile&) = default;
};

Rational rational_from_json(const Json& j, const std::string& path);
RatVector vector_from_json(const Json& j, std::size_t len, const std::string& path);
RatMatrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols, const std::string& path);
/// Matrix of any shape; every row must have the same length.
RatMatrix any_matrix_from_json(const Json& j, const std::string& path);

Json to_json(const Rational& q);
Json to_json(std::span<const Rational> v);
Json to_json(const RatMatrix& m);

InstanceFile parse_instance(const Json& j);
InstanceFile parse_instance_text(const std::string& text);
Json instance_to_json(const InstanceFile& f);

/// Reads a whole file; throws InputError if it cannot be opened.
std::string read_file(const std::string& path);
Json parse_json_text(const std::string& text);

Json trace_to_json(const FeasibilityTrace& t);
const char* status_name(SolveStatus s);

}  // namespace micqp
