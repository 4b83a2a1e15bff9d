#pragma once

#include "entangle/roof.hpp"

#include <string>
#include <vector>

namespace entangle {

enum class Party { Alice, Bob };

/// Node address in an LOCC tree: the root is the empty path, the y-th child
/// (1-based) of node x is x followed by y.
using NodePath = std::vector<int>;

std::string format_path(const NodePath& path);

/// x precedes y when x is a proper prefix of y.
bool path_precedes(const NodePath& x, const NodePath& y);

/// Immediate successors of x within a set of paths: y with x < y and
/// len(y) = len(x) + 1.
std::vector<NodePath> immediate_successors(const std::vector<NodePath>& tree, const NodePath& x);

/// Paths with no immediate successor.
std::vector<NodePath> final_nodes(const std::vector<NodePath>& tree);

/// One party's instrument. Kraus operators act on the acting party's current
/// local space only and may be rectangular (the local space can change size);
/// child y is reached through kraus[y-1].
struct LoccNode {
  Party party = Party::Alice;
  std::vector<ComplexMatrix> kraus;
  std::vector<LoccNode> children;

  bool is_leaf() const { return kraus.empty() && children.empty(); }

  static LoccNode leaf() { return {}; }
  /// A node applying `kraus` whose children are all leaves.
  static LoccNode instrument(Party party, std::vector<ComplexMatrix> kraus);

  /// Every path in the subtree rooted here, depth-first, parents first.
  std::vector<NodePath> paths() const;
  /// nullptr if the path does not exist.
  const LoccNode* find(const NodePath& path) const;
};

struct ValidationIssue {
  enum class Kind { Completeness, Dimension, Structure };
  NodePath node;
  Kind kind = Kind::Structure;
  std::string message;
  /// ||sum K^dag K - I||_F for completeness issues, 0 otherwise.
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool valid() const { return issues.empty(); }
};

/// Never throws on a malformed tree; every problem is reported.
ValidationReport validate_tree(const LoccNode& root, const BipartiteDims& dims, double tol = 1e-10);

struct BranchState {
  NodePath nodeId;
  /// Absolute unnormalized state: the Kraus chain from the root applied to rho.
  ComplexMatrix unnormalized;
  /// Tr(unnormalized): probability of reaching this node.
  double probability = 0.0;
  /// Probability given the parent: Tr of the Kraus image of the parent's
  /// normalized state.
  double conditionalProbability = 1.0;
  BipartiteDims dims;
  bool leaf = false;
};

struct TreeRun {
  /// levels[l] holds the branch states at depth l, ordered by path.
  std::vector<std::vector<BranchState>> levels;
  DensityOperator output;
};

/// Throws InvalidInput (with the validation messages) for an invalid tree.
TreeRun run_tree(const LoccNode& root, const DensityOperator& rho);

inline constexpr double kPruneProbability = 1e-12;

struct BranchValue {
  NodePath node;
  double probability = 0.0;
  double value = 0.0;
  /// True when the branch state is pure and the measure was evaluated exactly.
  bool exact = false;
  /// Optimizer gap estimate for roof-evaluated branches, 0 if exact.
  double gapEstimate = 0.0;
};

struct NodeAudit {
  NodePath node;
  double probability = 0.0;
  double parentValue = 0.0;
  /// sum over children of conditional probability times child value.
  double childAverage = 0.0;
  /// parent - average for decreasing monotones, average - parent for
  /// increasing ones. Nonnegative whenever the inequality holds.
  double slack = 0.0;
  /// Sum of the gap estimates of every roof evaluation involved.
  double gapAllowance = 0.0;
  bool exact = false;
  bool violation = false;
  int prunedChildren = 0;
};

struct AuditReport {
  std::vector<BranchValue> branches;
  std::vector<NodeAudit> nodes;
  std::vector<NodePath> pruned;
  double inputValue = 0.0;
  double outputValue = 0.0;
  double endToEndSlack = 0.0;
  double endToEndGap = 0.0;
  bool endToEndViolation = false;
  bool increasing = false;

  bool any_violation() const;
};

/// Value of a measure on a (possibly mixed) state: exact for pure states,
/// otherwise the convex (concave for increasing measures) roof.
BranchValue evaluate_state(const ComplexMatrix& state, const BipartiteDims& dims, const MeasureSpec& spec,
                           const RoofOptions& roof);

/// Checks the node-wise inequality mu(rho_x) >= sum_y p(y|x) mu(rho_y) at every
/// non-final node, and mu(rho) >= mu(Lambda(rho)). A violation is only
/// reported if slack < -(gap allowance) - 1e-6.
AuditReport audit_monotonicity(const LoccNode& root, const DensityOperator& rho, const MeasureSpec& spec,
                               const RoofOptions& roof = {});

}  // namespace entangle
