#pragma once

#include "entangle/locc.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace entangle::io {

using Json = nlohmann::json;

/// Malformed or invariant-violating input file. Exit code 2.
class ParseError : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

// Complex numbers are [re, im] pairs; matrices are arrays of rows.
Json to_json(Scalar z);
Json to_json(const ComplexVector& v);
Json to_json(const ComplexMatrix& m);
Json to_json(const RealVector& v);
Json to_json(const BipartiteDims& dims);

Scalar complex_from_json(const Json& j);
ComplexVector vector_from_json(const Json& j);
/// Accepts an array of rows, or a flat row-major array whose length is a
/// perfect square.
ComplexMatrix matrix_from_json(const Json& j);
BipartiteDims dims_from_json(const Json& j);

struct StateFile {
  enum class Kind { Pure, Density };
  Kind kind = Kind::Pure;
  BipartiteDims dims;
  std::optional<PureState> pure;
  std::optional<DensityOperator> density;

  DensityOperator as_density() const;
};

/// {"kind": "pure"|"density", "dims": {"dimA": a, "dimB": b}, "data": ...}
StateFile parse_state(const Json& j);
Json state_to_json(const PureState& psi);
Json state_to_json(const DensityOperator& rho);

struct TreeFile {
  BipartiteDims dims;
  LoccNode root;
  ValidationReport validation;
};

/// {"dims": ..., "root": {"party": "alice"|"bob", "kraus": [matrix...],
/// "children": [node...]}}. A node without "children" gets one leaf per Kraus
/// operator. Structural JSON errors throw ParseError; LOCC validity problems
/// are reported in `validation`.
TreeFile parse_tree(const Json& j);
Json tree_to_json(const LoccNode& root, const BipartiteDims& dims);

std::string read_file(const std::string& path);
std::string sha256_hex(const std::string& bytes);

/// Parses text as JSON, mapping syntax errors to ParseError.
Json parse_json_text(const std::string& text, const std::string& origin);

}  // namespace entangle::io
