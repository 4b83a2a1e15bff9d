#include "entangle/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace entangle::io {

Json to_json(Scalar z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(to_json(v(i)));
  }
  return out;
}

Json to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(to_json(m(i, j)));
    }
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const RealVector& v) {
  Json out = Json::array();
  for (const double x : v) {
    out.push_back(x);
  }
  return out;
}

Json to_json(const BipartiteDims& dims) { return Json{{"dimA", dims.dimA}, {"dimB", dims.dimB}}; }

namespace {

bool is_complex_pair(const Json& j) { return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(); }

std::size_t positive_dim(const Json& j, const char* name) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    throw ParseError(std::string("dims.") + name + " must be a positive integer");
  }
  return static_cast<std::size_t>(j.get<long long>());
}

}  // namespace

Scalar complex_from_json(const Json& j) {
  if (!is_complex_pair(j)) {
    throw ParseError("complex number must be a two-element array [re, im], got " + j.dump());
  }
  const Scalar z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw ParseError("non-finite complex entry");
  }
  return z;
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("expected a non-empty array of [re, im] pairs");
  }
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  }
  return v;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("expected a non-empty matrix");
  }
  if (is_complex_pair(j[0])) {
    const ComplexVector flat = vector_from_json(j);
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
    if (n * n != flat.size()) {
      throw ParseError("flat matrix data length " + std::to_string(flat.size()) + " is not a perfect square");
    }
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        m(i, k) = flat(i * n + k);
      }
    }
    return m;
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  ComplexMatrix m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const ComplexVector row = vector_from_json(j[static_cast<std::size_t>(i)]);
    if (cols < 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      throw ParseError("ragged matrix: row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                       " entries, expected " + std::to_string(cols));
    }
    m.row(i) = row.transpose();
  }
  return m;
}

BipartiteDims dims_from_json(const Json& j) {
  if (j.is_object()) {
    if (!j.contains("dimA") || !j.contains("dimB")) {
      throw ParseError("dims object needs dimA and dimB");
    }
    return {positive_dim(j["dimA"], "dimA"), positive_dim(j["dimB"], "dimB")};
  }
  if (j.is_array() && j.size() == 2) {
    return {positive_dim(j[0], "dimA"), positive_dim(j[1], "dimB")};
  }
  throw ParseError("dims must be {\"dimA\": a, \"dimB\": b} or [a, b]");
}

DensityOperator StateFile::as_density() const {
  return kind == Kind::Pure ? DensityOperator::fromPure(*pure) : *density;
}

StateFile parse_state(const Json& j) {
  if (!j.is_object()) {
    throw ParseError("state file must be a JSON object");
  }
  for (const char* key : {"kind", "dims", "data"}) {
    if (!j.contains(key)) {
      throw ParseError(std::string("state file is missing field '") + key + "'");
    }
  }
  StateFile out;
  const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
  out.dims = dims_from_json(j["dims"]);
  try {
    if (kind == "pure") {
      out.kind = StateFile::Kind::Pure;
      out.pure.emplace(vector_from_json(j["data"]), out.dims);
    } else if (kind == "density") {
      out.kind = StateFile::Kind::Density;
      out.density.emplace(matrix_from_json(j["data"]), out.dims);
    } else {
      throw ParseError("state kind must be \"pure\" or \"density\"");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
  return out;
}

Json state_to_json(const PureState& psi) {
  return Json{{"kind", "pure"}, {"dims", to_json(psi.dims())}, {"data", to_json(psi.amplitudes())}};
}

Json state_to_json(const DensityOperator& rho) {
  return Json{{"kind", "density"}, {"dims", to_json(rho.dims())}, {"data", to_json(rho.matrix())}};
}

namespace {

LoccNode parse_node(const Json& j, const std::string& where) {
  if (!j.is_object()) {
    throw ParseError("tree node " + where + " must be an object");
  }
  LoccNode node;
  if (j.contains("party")) {
    const std::string p = j["party"].is_string() ? j["party"].get<std::string>() : "";
    if (p == "alice" || p == "Alice" || p == "A") {
      node.party = Party::Alice;
    } else if (p == "bob" || p == "Bob" || p == "B") {
      node.party = Party::Bob;
    } else {
      throw ParseError("tree node " + where + ": party must be \"alice\" or \"bob\"");
    }
  }
  if (j.contains("kraus")) {
    if (!j["kraus"].is_array()) {
      throw ParseError("tree node " + where + ": kraus must be an array of matrices");
    }
    for (const auto& k : j["kraus"]) {
      node.kraus.push_back(matrix_from_json(k));
    }
    if (!node.kraus.empty() && !j.contains("party")) {
      throw ParseError("tree node " + where + ": a node with Kraus operators needs a party");
    }
  }
  if (j.contains("children")) {
    if (!j["children"].is_array()) {
      throw ParseError("tree node " + where + ": children must be an array");
    }
    int y = 1;
    for (const auto& c : j["children"]) {
      node.children.push_back(parse_node(c, where == "()" ? "(" + std::to_string(y) + ")"
                                                          : where.substr(0, where.size() - 1) + "," +
                                                                std::to_string(y) + ")"));
      ++y;
    }
  } else {
    node.children.resize(node.kraus.size());
  }
  return node;
}

Json node_to_json(const LoccNode& node) {
  Json j = Json::object();
  if (node.is_leaf()) {
    return j;
  }
  j["party"] = node.party == Party::Alice ? "alice" : "bob";
  j["kraus"] = Json::array();
  for (const auto& k : node.kraus) {
    j["kraus"].push_back(to_json(k));
  }
  j["children"] = Json::array();
  for (const auto& c : node.children) {
    j["children"].push_back(node_to_json(c));
  }
  return j;
}

}  // namespace

TreeFile parse_tree(const Json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("root")) {
    throw ParseError("tree file must be an object with 'dims' and 'root'");
  }
  TreeFile out{dims_from_json(j["dims"]), parse_node(j["root"], "()"), {}};
  out.validation = validate_tree(out.root, out.dims);
  return out;
}

Json tree_to_json(const LoccNode& root, const BipartiteDims& dims) {
  return Json{{"dims", to_json(dims)}, {"root", node_to_json(root)}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(origin + ": malformed JSON: " + e.what());
  }
}

}  // namespace entangle::io
