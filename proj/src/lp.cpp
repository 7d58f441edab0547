#include "mves/lp.hpp"

#include <Eigen/LU>
#include <charconv>
#include <sstream>

namespace mves {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

void validate(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.vars.size());
  if (lp.objective.size() != n) throw DataError("lp: objective size != variable count");
  for (const VariableDef& v : lp.vars) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      throw DataError("lp: bad bounds on variable " + v.name);
    if (!std::isfinite(v.lower)) throw DataError("lp: lower bound must be finite on " + v.name);
  }
  auto check_rows = [n](const std::vector<LinearRow>& rows) {
    for (const LinearRow& r : rows) {
      if (!std::isfinite(r.rhs)) throw DataError("lp: non-finite rhs in row " + r.name);
      for (auto& [j, coef] : r.terms) {
        if (j < 0 || j >= n) throw DataError("lp: bad variable index in row " + r.name);
        if (!std::isfinite(coef)) throw DataError("lp: non-finite coefficient in row " + r.name);
      }
    }
  };
  check_rows(lp.eq_rows);
  check_rows(lp.le_rows);
}

std::string dump(const LinearProgram& lp) {
  std::ostringstream os;
  auto num = [](double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  os << "min";
  for (int j = 0; j < lp.objective.size(); ++j)
    if (lp.objective[j] != 0.0) os << " + " << num(lp.objective[j]) << " " << lp.vars[j].name;
  if (lp.objective_constant != 0.0) os << " + " << num(lp.objective_constant);
  os << "\n";
  auto row_line = [&](const LinearRow& r, const char* rel) {
    os << r.name << ":";
    for (auto& [j, coef] : r.terms) os << " + " << num(coef) << " " << lp.vars[j].name;
    os << " " << rel << " " << num(r.rhs) << "\n";
  };
  for (const LinearRow& r : lp.eq_rows) row_line(r, "=");
  for (const LinearRow& r : lp.le_rows) row_line(r, "<=");
  for (const VariableDef& v : lp.vars)
    os << v.name << " in [" << num(v.lower) << ", "
       << (v.upper == kInf ? "inf" : num(v.upper)) << "]\n";
  return os.str();
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kReducedTol = 1e-9;
constexpr double kFeasTol = 1e-7;

enum class VarState : unsigned char { Basic, AtLower, AtUpper };
enum class StepResult { Pivoted, PhaseOptimal, Unbounded };

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Simplex {
  int n_struct = 0;
  int n_slack = 0;
  int n_art = 0;
  int m = 0;
  RowMat tab;    // m x cols, kept as B^-1 * [A | slacks | artificials]
  RowMat orig;   // pristine copy for the final refinement
  Vec beta;      // current basic values
  Vec b0;
  Vec upper;     // column upper bounds in shifted space; 0 pegs a column
  Eigen::RowVectorXd d1, d2;
  std::vector<int> basis;
  std::vector<VarState> state;
  std::vector<int> art_row;
  int iterations = 0;
  bool bland = false;
  int degenerate_streak = 0;

  int cols() const { return n_struct + n_slack + n_art; }

  double value_of(int j) const {
    if (state[j] == VarState::AtUpper) return upper[j];
    if (state[j] == VarState::Basic)
      for (int i = 0; i < m; ++i)
        if (basis[i] == j) return beta[i];
    return 0.0;
  }

  void eliminate(int row, int col) {
    const double piv = tab(row, col);
    tab.row(row) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = tab(i, col);
      if (f != 0.0) tab.row(i) -= f * tab.row(row);
    }
    const double f1 = d1[col];
    if (f1 != 0.0) d1 -= f1 * tab.row(row);
    const double f2 = d2[col];
    if (f2 != 0.0) d2 -= f2 * tab.row(row);
  }

  StepResult step(const Eigen::RowVectorXd& d) {
    int e = -1;
    double best = 0.0;
    for (int j = 0; j < cols(); ++j) {
      if (state[j] == VarState::Basic || upper[j] == 0.0) continue;
      double viol = 0.0;
      if (state[j] == VarState::AtLower && d[j] < -kReducedTol) viol = -d[j];
      if (state[j] == VarState::AtUpper && d[j] > kReducedTol) viol = d[j];
      if (viol <= 0.0) continue;
      if (bland) { e = j; break; }
      if (viol > best + 1e-15) { best = viol; e = j; }
    }
    if (e < 0) return StepResult::PhaseOptimal;

    const double sigma = state[e] == VarState::AtLower ? 1.0 : -1.0;
    const Vec w = tab.col(e);

    double t_max = upper[e];
    int leave = -1;
    bool leave_at_upper = false;
    for (int i = 0; i < m; ++i) {
      const double g = sigma * w[i];
      double limit;
      bool to_upper;
      if (g > kPivotTol) {
        limit = std::max(0.0, beta[i]) / g;
        to_upper = false;
      } else if (g < -kPivotTol && upper[basis[i]] != kInf) {
        limit = std::max(0.0, upper[basis[i]] - beta[i]) / (-g);
        to_upper = true;
      } else {
        continue;
      }
      if (limit < t_max - 1e-12 ||
          (leave >= 0 && limit <= t_max + 1e-12 && basis[i] < basis[leave])) {
        t_max = std::min(t_max, limit);
        leave = i;
        leave_at_upper = to_upper;
      }
    }
    if (leave < 0 && t_max == kInf) return StepResult::Unbounded;

    ++iterations;
    degenerate_streak = t_max < 1e-11 ? degenerate_streak + 1 : 0;
    if (degenerate_streak > 60) bland = true;

    if (leave < 0) {
      beta -= sigma * t_max * w;
      state[e] = state[e] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
      return StepResult::Pivoted;
    }

    beta -= sigma * t_max * w;
    beta[leave] = state[e] == VarState::AtLower ? t_max : upper[e] - t_max;
    state[basis[leave]] = leave_at_upper ? VarState::AtUpper : VarState::AtLower;
    state[e] = VarState::Basic;
    const int old_basic = basis[leave];
    basis[leave] = e;
    (void)old_basic;
    eliminate(leave, e);
    return StepResult::Pivoted;
  }

  double artificial_level() const {
    double level = 0.0;
    for (int i = 0; i < m; ++i)
      if (basis[i] >= n_struct + n_slack) level += std::max(0.0, beta[i]);
    return level;
  }
};

}  // namespace

SolveReport solve(const LinearProgram& lp) {
  validate(lp);
  const int n = static_cast<int>(lp.vars.size());
  const int m_eq = static_cast<int>(lp.eq_rows.size());
  const int m_le = static_cast<int>(lp.le_rows.size());

  Simplex sx;
  sx.m = m_eq + m_le;
  sx.n_struct = n;
  sx.n_slack = m_le;

  Vec shift(n);
  for (int j = 0; j < n; ++j) shift[j] = lp.vars[j].lower;

  Vec rhs = Vec::Zero(sx.m);
  RowMat a = RowMat::Zero(sx.m, n + m_le);
  auto load_row = [&](int i, const LinearRow& r) {
    double b = r.rhs;
    for (auto& [j, coef] : r.terms) {
      a(i, j) += coef;
      b -= coef * shift[j];
    }
    rhs[i] = b;
  };
  for (int i = 0; i < m_eq; ++i) load_row(i, lp.eq_rows[i]);
  for (int i = 0; i < m_le; ++i) {
    load_row(m_eq + i, lp.le_rows[i]);
    a(m_eq + i, n + i) = 1.0;
  }
  std::vector<bool> negated(sx.m, false);
  for (int i = 0; i < sx.m; ++i)
    if (rhs[i] < 0.0) {
      a.row(i) = -a.row(i);
      rhs[i] = -rhs[i];
      negated[i] = true;
    }

  std::vector<int> art_of_row(sx.m, -1);
  for (int i = 0; i < sx.m; ++i)
    if (i < m_eq || negated[i]) {
      art_of_row[i] = sx.n_art++;
      sx.art_row.push_back(i);
    }

  const int cols = n + m_le + sx.n_art;
  sx.tab = RowMat::Zero(sx.m, cols);
  sx.tab.leftCols(n + m_le) = a;
  for (int i = 0; i < sx.m; ++i)
    if (art_of_row[i] >= 0) sx.tab(i, n + m_le + art_of_row[i]) = 1.0;
  sx.orig = sx.tab;
  sx.b0 = rhs;
  sx.beta = rhs;

  sx.upper = Vec::Constant(cols, kInf);
  for (int j = 0; j < n; ++j) sx.upper[j] = lp.vars[j].upper - lp.vars[j].lower;

  sx.state.assign(cols, VarState::AtLower);
  sx.basis.assign(sx.m, -1);
  for (int i = 0; i < sx.m; ++i) {
    const int b = art_of_row[i] >= 0 ? n + m_le + art_of_row[i] : n + (i - m_eq);
    sx.basis[i] = b;
    sx.state[b] = VarState::Basic;
  }

  Vec c2 = Vec::Zero(cols);
  for (int j = 0; j < n; ++j) c2[j] = lp.objective[j];

  sx.d1 = Eigen::RowVectorXd::Zero(cols);
  for (int k = 0; k < sx.n_art; ++k) sx.d1[n + m_le + k] = 1.0;
  for (int i = 0; i < sx.m; ++i)
    if (art_of_row[i] >= 0) sx.d1 -= sx.tab.row(i);
  sx.d2 = c2.transpose();

  SolveReport rep;
  const int iter_cap = 2000 + 50 * (sx.m + n);

  // phase 1: drive the artificial level to zero
  if (sx.n_art > 0) {
    while (true) {
      if (sx.iterations >= iter_cap) {
        rep.status = SolveStatus::IterationLimit;
        rep.iterations = sx.iterations;
        return rep;
      }
      const StepResult r = sx.step(sx.d1);
      if (r == StepResult::Pivoted) continue;
      if (r == StepResult::Unbounded) {
        // cannot happen: the phase-1 objective is bounded below by zero
        rep.status = SolveStatus::IterationLimit;
        rep.iterations = sx.iterations;
        return rep;
      }
      break;
    }
    if (sx.artificial_level() > kFeasTol) {
      rep.status = SolveStatus::Infeasible;
      rep.iterations = sx.iterations;
      for (int i = 0; i < sx.m; ++i)
        if (sx.basis[i] >= n + m_le && sx.beta[i] > kFeasTol) {
          const int orig_row = sx.art_row[sx.basis[i] - n - m_le];
          rep.infeasible_rows.push_back(orig_row < m_eq ? lp.eq_rows[orig_row].name
                                                        : lp.le_rows[orig_row - m_eq].name);
        }
      return rep;
    }
    // retire artificials: peg every one, swap basic ones out where possible
    for (int j = n + m_le; j < cols; ++j) sx.upper[j] = 0.0;
    for (int i = 0; i < sx.m; ++i) {
      if (sx.basis[i] < n + m_le) continue;
      for (int j = 0; j < n + m_le; ++j) {
        if (sx.state[j] == VarState::Basic || std::abs(sx.tab(i, j)) <= kPivotTol) continue;
        if (sx.upper[j] == 0.0) continue;
        const double enter_value = sx.state[j] == VarState::AtLower ? 0.0 : sx.upper[j];
        sx.state[sx.basis[i]] = VarState::AtLower;
        sx.state[j] = VarState::Basic;
        sx.basis[i] = j;
        sx.eliminate(i, j);
        sx.beta[i] = enter_value;
        break;
      }
      // a row with no usable column is redundant; its artificial stays
      // basic at level zero and is pinned there by its zero upper bound
    }
  }

  // phase 2
  while (true) {
    if (sx.iterations >= iter_cap) {
      rep.status = SolveStatus::IterationLimit;
      rep.iterations = sx.iterations;
      return rep;
    }
    const StepResult r = sx.step(sx.d2);
    if (r == StepResult::Pivoted) continue;
    if (r == StepResult::Unbounded) {
      rep.status = SolveStatus::Unbounded;
      rep.iterations = sx.iterations;
      return rep;
    }
    break;
  }

  // re-derive basic values from the pristine matrix to shed pivot round-off
  if (sx.m > 0) {
    Vec adj = sx.b0;
    for (int j = 0; j < cols; ++j)
      if (sx.state[j] == VarState::AtUpper && sx.upper[j] != kInf && sx.upper[j] != 0.0)
        adj -= sx.orig.col(j) * sx.upper[j];
    Mat basis_mat(sx.m, sx.m);
    for (int i = 0; i < sx.m; ++i) basis_mat.col(i) = sx.orig.col(sx.basis[i]);
    Eigen::PartialPivLU<Mat> lu(basis_mat);
    const Vec refined = lu.solve(adj);
    if ((basis_mat * refined - adj).cwiseAbs().maxCoeff() < 1e-6) sx.beta = refined;
  }

  rep.status = SolveStatus::Optimal;
  rep.iterations = sx.iterations;
  rep.solution = Vec(n);
  for (int j = 0; j < n; ++j) rep.solution[j] = shift[j] + sx.value_of(j);
  rep.objective = lp.objective_constant;
  for (int j = 0; j < n; ++j) rep.objective += lp.objective[j] * rep.solution[j];
  return rep;
}

}  // namespace mves
