#include "entangle/locc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace entangle {

std::string format_path(const NodePath& path) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < path.size(); ++i) {
    os << (i ? "," : "") << path[i];
  }
  os << ')';
  return os.str();
}

bool path_precedes(const NodePath& x, const NodePath& y) {
  return x.size() < y.size() && std::equal(x.begin(), x.end(), y.begin());
}

std::vector<NodePath> immediate_successors(const std::vector<NodePath>& tree, const NodePath& x) {
  std::vector<NodePath> out;
  for (const auto& y : tree) {
    if (y.size() == x.size() + 1 && path_precedes(x, y)) {
      out.push_back(y);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodePath> final_nodes(const std::vector<NodePath>& tree) {
  std::vector<NodePath> out;
  for (const auto& x : tree) {
    if (immediate_successors(tree, x).empty()) {
      out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

LoccNode LoccNode::instrument(Party party, std::vector<ComplexMatrix> kraus) {
  LoccNode n;
  n.party = party;
  n.children.resize(kraus.size());
  n.kraus = std::move(kraus);
  return n;
}

namespace {

void collect_paths(const LoccNode& node, NodePath& path, std::vector<NodePath>& out) {
  out.push_back(path);
  for (std::size_t y = 0; y < node.children.size(); ++y) {
    path.push_back(static_cast<int>(y) + 1);
    collect_paths(node.children[y], path, out);
    path.pop_back();
  }
}

BipartiteDims after_kraus(const BipartiteDims& dims, Party party, const ComplexMatrix& k) {
  return party == Party::Alice ? BipartiteDims(static_cast<std::size_t>(k.rows()), dims.dimB)
                               : BipartiteDims(dims.dimA, static_cast<std::size_t>(k.rows()));
}

void validate_node(const LoccNode& node, NodePath& path, const BipartiteDims& dims, double tol,
                   ValidationReport& report, std::vector<std::pair<NodePath, BipartiteDims>>& leaves) {
  using Kind = ValidationIssue::Kind;
  if (node.kraus.empty()) {
    if (!node.children.empty()) {
      report.issues.push_back({path, Kind::Structure, "node has children but no Kraus operators", 0.0});
    }
    leaves.emplace_back(path, dims);
    return;
  }
  if (node.children.size() != node.kraus.size()) {
    report.issues.push_back({path, Kind::Structure,
                             "children count " + std::to_string(node.children.size()) + " != Kraus count " +
                                 std::to_string(node.kraus.size()),
                             0.0});
  }
  const auto local = static_cast<Eigen::Index>(dims.of(node.party == Party::Alice ? Side::A : Side::B));
  bool shapesOk = true;
  for (std::size_t y = 0; y < node.kraus.size(); ++y) {
    const auto& k = node.kraus[y];
    if (k.cols() != local || k.rows() < 1) {
      shapesOk = false;
      report.issues.push_back({path, Kind::Dimension,
                               "Kraus operator " + std::to_string(y + 1) + " has shape " + std::to_string(k.rows()) +
                                   "x" + std::to_string(k.cols()) + " but acts on a local space of dimension " +
                                   std::to_string(local),
                               0.0});
    } else if (!k.allFinite()) {
      shapesOk = false;
      report.issues.push_back({path, Kind::Structure, "Kraus operator " + std::to_string(y + 1) + " has non-finite entries", 0.0});
    }
  }
  if (shapesOk) {
    ComplexMatrix sum = ComplexMatrix::Zero(local, local);
    for (const auto& k : node.kraus) {
      sum.noalias() += k.adjoint() * k;
    }
    const double residual = (sum - ComplexMatrix::Identity(local, local)).norm();
    if (residual > tol) {
      report.issues.push_back({path, Kind::Completeness,
                               "Kraus operators are not complete: ||sum K^dag K - I|| = " + std::to_string(residual),
                               residual});
    }
  }
  const std::size_t n = std::min(node.children.size(), node.kraus.size());
  for (std::size_t y = 0; y < n; ++y) {
    const auto& k = node.kraus[y];
    if (k.cols() != local || k.rows() < 1) {
      continue;
    }
    path.push_back(static_cast<int>(y) + 1);
    validate_node(node.children[y], path, after_kraus(dims, node.party, k), tol, report, leaves);
    path.pop_back();
  }
}

ComplexMatrix lift(const ComplexMatrix& k, Party party, const BipartiteDims& dims) {
  return party == Party::Alice ? lift_local(k, Side::A, dims.dimB) : lift_local(k, Side::B, dims.dimA);
}

void run_node(const LoccNode& node, const BranchState& state, std::size_t depth, TreeRun& run,
              ComplexMatrix& output) {
  if (run.levels.size() <= depth) {
    run.levels.resize(depth + 1);
  }
  run.levels[depth].push_back(state);
  run.levels[depth].back().leaf = node.is_leaf();
  if (node.is_leaf()) {
    if (output.size() == 0) {
      output = state.unnormalized;
    } else {
      output += state.unnormalized;
    }
    return;
  }
  for (std::size_t y = 0; y < node.kraus.size(); ++y) {
    BranchState child;
    child.nodeId = state.nodeId;
    child.nodeId.push_back(static_cast<int>(y) + 1);
    child.dims = after_kraus(state.dims, node.party, node.kraus[y]);
    const ComplexMatrix l = lift(node.kraus[y], node.party, state.dims);
    ComplexMatrix u = l * state.unnormalized * l.adjoint();
    child.unnormalized = 0.5 * (u + u.adjoint());
    child.probability = std::max(0.0, child.unnormalized.trace().real());
    child.conditionalProbability = state.probability > 0.0 ? child.probability / state.probability : 0.0;
    run_node(node.children[y], child, depth + 1, run, output);
  }
}

}  // namespace

std::vector<NodePath> LoccNode::paths() const {
  std::vector<NodePath> out;
  NodePath path;
  collect_paths(*this, path, out);
  return out;
}

const LoccNode* LoccNode::find(const NodePath& path) const {
  const LoccNode* node = this;
  for (const int y : path) {
    if (y < 1 || static_cast<std::size_t>(y) > node->children.size()) {
      return nullptr;
    }
    node = &node->children[static_cast<std::size_t>(y - 1)];
  }
  return node;
}

ValidationReport validate_tree(const LoccNode& root, const BipartiteDims& dims, double tol) {
  ValidationReport report;
  std::vector<std::pair<NodePath, BipartiteDims>> leaves;
  NodePath path;
  validate_node(root, path, dims, tol, report, leaves);
  for (const auto& [leafPath, leafDims] : leaves) {
    if (!(leafDims == leaves.front().second)) {
      report.issues.push_back({leafPath, ValidationIssue::Kind::Dimension,
                               "final node ends in dims (" + std::to_string(leafDims.dimA) + "," +
                                   std::to_string(leafDims.dimB) + ") but " + format_path(leaves.front().first) +
                                   " ends in (" + std::to_string(leaves.front().second.dimA) + "," +
                                   std::to_string(leaves.front().second.dimB) + ")",
                               0.0});
    }
  }
  return report;
}

TreeRun run_tree(const LoccNode& root, const DensityOperator& rho) {
  const ValidationReport report = validate_tree(root, rho.dims());
  if (!report.valid()) {
    std::string msg = "invalid LOCC tree:";
    for (const auto& issue : report.issues) {
      msg += " " + format_path(issue.node) + " " + issue.message + ";";
    }
    throw InvalidInput(msg);
  }
  BranchState rootState;
  rootState.unnormalized = rho.matrix();
  rootState.probability = 1.0;
  rootState.conditionalProbability = 1.0;
  rootState.dims = rho.dims();

  TreeRun partial{{}, rho};
  ComplexMatrix output;
  run_node(root, rootState, 0, partial, output);
  BipartiteDims outDims = rho.dims();
  for (const auto& level : partial.levels) {
    for (const auto& b : level) {
      if (b.leaf) {
        outDims = b.dims;
      }
    }
  }
  const double tr = output.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    throw InvalidInput("LOCC tree is not trace preserving: Tr Lambda(rho) = " + std::to_string(tr));
  }
  partial.output = DensityOperator::fromUnnormalized(output, outDims);
  return partial;
}

bool AuditReport::any_violation() const {
  return endToEndViolation || std::any_of(nodes.begin(), nodes.end(), [](const NodeAudit& n) { return n.violation; });
}

BranchValue evaluate_state(const ComplexMatrix& state, const BipartiteDims& dims, const MeasureSpec& spec,
                           const RoofOptions& roof) {
  spec.validate(dims);
  BranchValue out;
  const EigenSystem es = eigh(0.5 * (state + state.adjoint()));
  if (numerical_rank(es.values) == 1) {
    const PureState psi = PureState::normalized(es.vectors.col(0), dims);
    out.value = evaluate(spec, psi);
    out.exact = true;
    return out;
  }
  const DensityOperator rho = DensityOperator::fromUnnormalized(state, dims);
  const Direction dir = spec.increasing() ? Direction::Maximize : Direction::Minimize;
  const RoofResult r = solve_roof(RoofProblem{rho, spec, dir, roof});
  out.value = r.value;
  out.gapEstimate = r.gapEstimate;
  return out;
}

AuditReport audit_monotonicity(const LoccNode& root, const DensityOperator& rho, const MeasureSpec& spec,
                               const RoofOptions& roof) {
  const TreeRun run = run_tree(root, rho);
  AuditReport report;
  report.increasing = spec.increasing();
  const double orient = report.increasing ? -1.0 : 1.0;

  std::map<NodePath, BranchValue> values;
  for (const auto& level : run.levels) {
    for (const auto& b : level) {
      if (b.probability < kPruneProbability) {
        report.pruned.push_back(b.nodeId);
        continue;
      }
      BranchValue v = evaluate_state(b.unnormalized / b.probability, b.dims, spec, roof);
      v.node = b.nodeId;
      v.probability = b.probability;
      values.emplace(b.nodeId, v);
      report.branches.push_back(v);
    }
  }

  for (const auto& level : run.levels) {
    for (const auto& b : level) {
      if (b.leaf || b.probability < kPruneProbability) {
        continue;
      }
      const BranchValue& parent = values.at(b.nodeId);
      NodeAudit na;
      na.node = b.nodeId;
      na.probability = b.probability;
      na.parentValue = parent.value;
      na.gapAllowance = parent.gapEstimate;
      na.exact = parent.exact;
      const LoccNode* node = root.find(b.nodeId);
      for (std::size_t y = 0; y < node->children.size(); ++y) {
        NodePath childPath = b.nodeId;
        childPath.push_back(static_cast<int>(y) + 1);
        const auto it = values.find(childPath);
        if (it == values.end()) {
          ++na.prunedChildren;
          continue;
        }
        na.childAverage += (it->second.probability / b.probability) * it->second.value;
        na.gapAllowance += it->second.gapEstimate;
        na.exact = na.exact && it->second.exact;
      }
      na.slack = orient * (na.parentValue - na.childAverage);
      na.violation = na.slack < -na.gapAllowance - 1e-6;
      report.nodes.push_back(na);
    }
  }

  const BranchValue in = values.at(NodePath{});
  const BranchValue out = evaluate_state(run.output.matrix(), run.output.dims(), spec, roof);
  report.inputValue = in.value;
  report.outputValue = out.value;
  report.endToEndSlack = orient * (in.value - out.value);
  report.endToEndGap = in.gapEstimate + out.gapEstimate;
  report.endToEndViolation = report.endToEndSlack < -report.endToEndGap - 1e-6;
  return report;
}

}  // namespace entangle
