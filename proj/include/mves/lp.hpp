#pragma once

#include "mves/types.hpp"

#include <limits>

namespace mves {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct VariableDef {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
};

// One linear constraint, sparse: sum of coef * var  (<=|=)  rhs.
struct LinearRow {
  std::string name;
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

// min objective . x + objective_constant subject to the rows and the
// per-variable bounds in the catalog.
struct LinearProgram {
  std::vector<VariableDef> vars;
  Vec objective;
  double objective_constant = 0.0;
  std::vector<LinearRow> eq_rows;
  std::vector<LinearRow> le_rows;
};

void validate(const LinearProgram& lp);
std::string dump(const LinearProgram& lp);  // one constraint per line

enum class SolveStatus { Optimal, Infeasible, IterationLimit, Unbounded };

const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::IterationLimit;
  double objective = 0.0;  // includes objective_constant
  Vec solution;            // one entry per catalog variable
  int iterations = 0;
  std::vector<std::string> infeasible_rows;  // rows no assignment can satisfy
};

// Dense two-phase primal simplex. Variable bounds are handled implicitly,
// entering choice is steepest reduced cost with lowest-index ties, and a
// long degenerate streak switches to lowest-index (Bland) pivoting, so the
// same input always yields the same report, bit for bit. The final basic
// values are re-solved from the clean constraint matrix to shed pivot
// round-off.
SolveReport solve(const LinearProgram& lp);

}  // namespace mves
