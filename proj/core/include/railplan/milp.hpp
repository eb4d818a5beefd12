#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace railplan::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kIntegralityTolerance = 1e-6;
inline constexpr double kFeasibilityTolerance = 1e-7;

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  bool integer = false;
  double objective = 0.0;
  bool operator==(const Variable&) const = default;
};

struct Term {
  int var = -1;
  double coef = 0.0;
  bool operator==(const Term&) const = default;
};

struct Constraint {
  std::string name;
  std::string family;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  bool operator==(const Constraint&) const = default;
};

// Minimization model with value semantics.
class ModelSpec {
 public:
  int addVariable(Variable v);
  int addConstraint(Constraint c);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const Variable& variable(int id) const { return vars_.at(id); }
  Variable& mutableVariable(int id) { return vars_.at(id); }
  int numVariables() const { return static_cast<int>(vars_.size()); }
  int numConstraints() const { return static_cast<int>(rows_.size()); }
  int findVariable(std::string_view name) const;  // -1 when absent
  bool hasIntegers() const;

  // Throws std::invalid_argument describing the first defect.
  void validate() const;

  double objectiveValue(std::span<const double> values) const;
  double rowActivity(int row, std::span<const double> values) const;
  // Largest bound/row violation and integrality error of an assignment.
  double maxViolation(std::span<const double> values) const;
  double maxIntegralityError(std::span<const double> values) const;

  std::string name = "model";
  bool operator==(const ModelSpec&) const = default;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::unordered_map<std::string, int> byName_;
};

// Persistent transforms; the input is never modified.
ModelSpec fixVariables(const ModelSpec& m, std::span<const std::pair<int, double>> assignments);
ModelSpec setIntegrality(const ModelSpec& m, std::span<const int> ids, bool integral);
ModelSpec relaxAll(const ModelSpec& m);

enum class VarKind {
  ExtraService,   // s_sigma
  BlockSelect,    // y_b
  BlockFlow,      // z_bk
  Unmet,          // z_k
  LoadedCars,     // x^gamma_b
  EmptyCars,      // w^gamma_b
  Allocation,     // w^gamma_theta
  PoolInventory,  // w^gamma_theta_i
  SinglePlatform, // nu^tau_b_pi
  PairPlatform,   // nu^{tau,tau'}_b_pi
};
inline constexpr int kVarKindCount = 10;
const char* toString(VarKind k);

struct VarKey {
  VarKind kind = VarKind::BlockSelect;
  std::array<int, 4> idx{-1, -1, -1, -1};
  bool operator==(const VarKey&) const = default;
};

struct VarKeyHash {
  std::size_t operator()(const VarKey& k) const noexcept;
};

// Bijection between model-variable keys and columns.
class VariableRegistry {
 public:
  void add(const VarKey& key, int column);
  std::optional<int> find(const VarKey& key) const;
  int at(const VarKey& key) const;  // throws when absent
  const VarKey& keyOf(int column) const { return keys_.at(column); }
  std::vector<int> columnsOf(VarKind kind) const;
  std::size_t size() const { return keys_.size(); }
  std::size_t count(VarKind kind) const;

 private:
  std::vector<VarKey> keys_;
  std::unordered_map<VarKey, int, VarKeyHash> map_;
};

struct SolverOptions {
  bool relaxAll = false;
  double gapTarget = 0.025;
  double timeLimit = kInf;  // seconds
  int threads = 1;
  std::optional<std::vector<double>> warmStart;
  double integralityTolerance = kIntegralityTolerance;
  double feasibilityTolerance = kFeasibilityTolerance;
  bool verbose = false;
  int randomSeed = 0;
};

enum class SolveStatus { Optimal, FeasibleAtLimit, Infeasible, Unbounded, Error };
const char* toString(SolveStatus s);

struct BoundSample {
  double time = 0.0;
  double primal = kInf;
  double dual = -kInf;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  double objective = kInf;
  double bound = -kInf;
  double gap = kInf;
  std::vector<double> values;
  double wallTime = 0.0;
  std::string message;
  std::vector<BoundSample> timeline;
  bool warmStartUsed = false;

  bool hasSolution() const { return status == SolveStatus::Optimal || status == SolveStatus::FeasibleAtLimit; }
};

std::string solveLogJson(const SolveResult& r);

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual bool reentrant() const = 0;
  virtual SolveResult solve(const ModelSpec& model, const SolverOptions& options) = 0;
};

// "highs" is bundled. Empty name reads RAILPLAN_SOLVER, falling back to "highs".
std::unique_ptr<SolverBackend> makeBackend(std::string_view name = {});
std::vector<std::string> availableBackends();

std::string toLpFormat(const ModelSpec& m);
ModelSpec parseLpFormat(std::string_view text);

}  // namespace railplan::milp
