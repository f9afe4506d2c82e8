#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace gridsched {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ObjectiveSense : std::uint8_t { Maximize, Minimize };
enum class RowSense : std::uint8_t { LessEqual, GreaterEqual, Equal };

struct LpTerm {
  int var;
  double coeff;
};

struct LpRow {
  std::vector<LpTerm> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

// max/min c^T x  s.t.  rows,  lower <= x <= upper.
// Each variable needs at least one finite bound or is treated as free.
class LinearProgram {
 public:
  ObjectiveSense sense = ObjectiveSense::Maximize;

  int add_variable(double cost, double lower = 0.0, double upper = kInf);
  int add_row(std::vector<LpTerm> terms, RowSense sense, double rhs);

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }

  // Throws std::invalid_argument on non-finite coefficients, bad indices or
  // crossed bounds.
  void validate() const;

  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpRow> rows;
};

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };
std::string to_string(LpStatus s);

enum class SimplexMethod : std::uint8_t { Dual, Primal };

struct LpOptions {
  long max_iterations = 1'000'000;
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 64;
};

// Optimality residuals, each scaled by the magnitude of the data involved.
struct LpResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double complementary = 0.0;
  double duality_gap = 0.0;  // |primal obj - dual obj| / (1 + |primal obj|)
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  // Row duals in the sign convention of the original objective sense.
  std::vector<double> duals;
  // c_j - A_j^T y in the original objective sense.
  std::vector<double> reduced_costs;
  double objective = 0.0;
  long iterations = 0;
  SimplexMethod method = SimplexMethod::Dual;
  bool used_bland = false;
};

// Bounded-variable revised simplex on an explicit dense basis inverse.
// Starts from the slack basis. When every nonbasic variable can be parked at a
// bound that makes its reduced cost dual feasible, runs the dual simplex;
// otherwise runs a two-phase primal simplex. Dantzig pricing throughout,
// switching to Bland's rule after 5 * (rows + columns) degenerate pivots.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

// Dual objective b^T y + sum_j (bound term of the reduced cost), in the
// original objective sense.
double dual_objective(const LinearProgram& lp, const LpSolution& sol);

// Residuals of an Optimal solution, computed from the LP data alone.
LpResiduals lp_residuals(const LinearProgram& lp, const LpSolution& sol);

}  // namespace gridsched
