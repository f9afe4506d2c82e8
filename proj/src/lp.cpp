#include "gridsched/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridsched {

int LinearProgram::add_variable(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  return static_cast<int>(objective.size()) - 1;
}

int LinearProgram::add_row(std::vector<LpTerm> terms, RowSense row_sense, double rhs) {
  rows.push_back({std::move(terms), row_sense, rhs});
  return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::validate() const {
  const std::size_t n = objective.size();
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("LP bound vectors do not match the variable count");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) throw std::invalid_argument("LP objective must be finite");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
        lower[j] == kInf || upper[j] == -kInf) {
      throw std::invalid_argument("LP variable bounds are inconsistent");
    }
  }
  for (const LpRow& row : rows) {
    if (!std::isfinite(row.rhs)) throw std::invalid_argument("LP right-hand side must be finite");
    for (const LpTerm& t : row.terms) {
      if (t.var < 0 || static_cast<std::size_t>(t.var) >= n) {
        throw std::invalid_argument("LP row references an unknown variable");
      }
      if (!std::isfinite(t.coeff)) throw std::invalid_argument("LP coefficients must be finite");
    }
  }
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free };

enum class PhaseOutcome : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {
    m_ = lp.num_rows();
    n_ = lp.num_vars();
    build_columns();
  }

  LpSolution run() {
    LpSolution sol;
    PhaseOutcome outcome;
    if (init_dual_feasible_start()) {
      sol.method = SimplexMethod::Dual;
      outcome = dual_simplex();
      if (outcome == PhaseOutcome::Optimal && !dual_feasible()) {
        // Numerical drift in the reduced costs; finish from the primal feasible basis.
        outcome = primal_simplex();
      }
    } else {
      sol.method = SimplexMethod::Primal;
      outcome = two_phase_primal();
    }
    sol.iterations = iterations_;
    sol.used_bland = bland_;
    switch (outcome) {
      case PhaseOutcome::Optimal: sol.status = LpStatus::Optimal; break;
      case PhaseOutcome::Infeasible: sol.status = LpStatus::Infeasible; return sol;
      case PhaseOutcome::Unbounded: sol.status = LpStatus::Unbounded; return sol;
      case PhaseOutcome::IterationLimit: sol.status = LpStatus::IterationLimit; return sol;
    }
    extract(sol);
    return sol;
  }

 private:
  // Columns: structurals [0, n), slacks [n, n + m), artificials after that.
  void build_columns() {
    std::vector<std::vector<std::pair<int, double>>> cols(n_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (const LpTerm& t : lp_.rows[i].terms) {
        if (t.coeff != 0.0) cols[static_cast<std::size_t>(t.var)].push_back({static_cast<int>(i), t.coeff});
      }
    }
    col_start_.push_back(0);
    for (auto& c : cols) {
      std::sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      // Merge duplicate entries for the same row.
      for (std::size_t e = 0; e < c.size(); ++e) {
        if (!col_row_.empty() && col_row_.size() > static_cast<std::size_t>(col_start_.back()) &&
            col_row_.back() == c[e].first) {
          col_val_.back() += c[e].second;
        } else {
          col_row_.push_back(c[e].first);
          col_val_.push_back(c[e].second);
        }
      }
      col_start_.push_back(static_cast<int>(col_row_.size()));
    }
    const bool maximize = lp_.sense == ObjectiveSense::Maximize;
    for (std::size_t j = 0; j < n_; ++j) {
      lo_.push_back(lp_.lower[j]);
      hi_.push_back(lp_.upper[j]);
      true_cost_.push_back(maximize ? -lp_.objective[j] : lp_.objective[j]);
    }
    rhs_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const LpRow& row = lp_.rows[i];
      rhs_[i] = row.rhs;
      add_column({static_cast<int>(i)}, {1.0});
      switch (row.sense) {
        case RowSense::LessEqual: lo_.push_back(0.0); hi_.push_back(kInf); break;
        case RowSense::GreaterEqual: lo_.push_back(-kInf); hi_.push_back(0.0); break;
        case RowSense::Equal: lo_.push_back(0.0); hi_.push_back(0.0); break;
      }
      true_cost_.push_back(0.0);
    }
    max_cost_ = 0.0;
    for (double c : true_cost_) max_cost_ = std::max(max_cost_, std::abs(c));
    max_rhs_ = 0.0;
    for (double b : rhs_) max_rhs_ = std::max(max_rhs_, std::abs(b));
  }

  void add_column(std::vector<int> rows, std::vector<double> vals) {
    for (std::size_t e = 0; e < rows.size(); ++e) {
      col_row_.push_back(rows[e]);
      col_val_.push_back(vals[e]);
    }
    col_start_.push_back(static_cast<int>(col_row_.size()));
  }

  std::size_t ncols() const { return col_start_.size() - 1; }

  double dot_column(std::size_t j, const std::vector<double>& v) const {
    double s = 0.0;
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) s += col_val_[e] * v[static_cast<std::size_t>(col_row_[e])];
    return s;
  }

  // w = B^{-1} a_j
  void ftran(std::size_t j, std::vector<double>& w) const {
    std::fill(w.begin(), w.end(), 0.0);
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      const double v = col_val_[e];
      const double* col = &binv_[static_cast<std::size_t>(col_row_[e]) * m_];
      for (std::size_t i = 0; i < m_; ++i) w[i] += v * col[i];
    }
  }

  void park_nonbasic(std::size_t j, double reduced_cost) {
    const bool has_lo = std::isfinite(lo_[j]);
    const bool has_hi = std::isfinite(hi_[j]);
    if (reduced_cost > opt_.dual_tol && has_lo) {
      state_[j] = VarState::AtLower;
    } else if (reduced_cost < -opt_.dual_tol && has_hi) {
      state_[j] = VarState::AtUpper;
    } else if (has_lo) {
      state_[j] = VarState::AtLower;
    } else if (has_hi) {
      state_[j] = VarState::AtUpper;
    } else {
      state_[j] = VarState::Free;
    }
    x_[j] = state_[j] == VarState::AtLower ? lo_[j] : state_[j] == VarState::AtUpper ? hi_[j] : 0.0;
  }

  void reset_slack_basis() {
    const std::size_t nc = ncols();
    state_.assign(nc, VarState::AtLower);
    x_.assign(nc, 0.0);
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) basis_[i] = static_cast<int>(n_ + i);
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    w_.assign(m_, 0.0);
    y_.assign(m_, 0.0);
    d_.assign(nc, 0.0);
  }

  // Parks every structural at the bound matching the sign of its cost. Fails
  // when a needed bound is infinite.
  bool init_dual_feasible_start() {
    reset_slack_basis();
    cost_ = true_cost_;
    for (std::size_t j = 0; j < n_; ++j) {
      const double c = cost_[j];
      if (c > opt_.dual_tol && !std::isfinite(lo_[j])) return false;
      if (c < -opt_.dual_tol && !std::isfinite(hi_[j])) return false;
      park_nonbasic(j, c);
    }
    for (std::size_t i = 0; i < m_; ++i) state_[n_ + i] = VarState::Basic;
    recompute_basic_values();
    return true;
  }

  void recompute_basic_values() {
    std::vector<double> r = rhs_;
    for (std::size_t j = 0; j < ncols(); ++j) {
      if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        r[static_cast<std::size_t>(col_row_[e])] -= col_val_[e] * x_[j];
      }
    }
    for (std::size_t i = 0; i < m_; ++i) x_[static_cast<std::size_t>(basis_[i])] = 0.0;
    for (std::size_t c = 0; c < m_; ++c) {
      if (r[c] == 0.0) continue;
      const double* col = &binv_[c * m_];
      for (std::size_t i = 0; i < m_; ++i) x_[static_cast<std::size_t>(basis_[i])] += col[i] * r[c];
    }
  }

  // Gauss-Jordan inversion of the basis matrix with partial pivoting.
  void refactor() {
    std::vector<double> a(m_ * m_, 0.0);  // row-major B
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = static_cast<std::size_t>(basis_[i]);
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        a[static_cast<std::size_t>(col_row_[e]) * m_ + i] = col_val_[e];
      }
    }
    std::vector<double> inv(m_ * m_, 0.0);  // row-major
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      double best = std::abs(a[c * m_ + c]);
      for (std::size_t r = c + 1; r < m_; ++r) {
        if (std::abs(a[r * m_ + c]) > best) {
          best = std::abs(a[r * m_ + c]);
          piv = r;
        }
      }
      if (best < 1e-14) throw std::runtime_error("simplex basis became singular");
      if (piv != c) {
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(a[piv * m_ + k], a[c * m_ + k]);
          std::swap(inv[piv * m_ + k], inv[c * m_ + k]);
        }
      }
      const double p = a[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        a[c * m_ + k] /= p;
        inv[c * m_ + k] /= p;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = a[r * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          a[r * m_ + k] -= f * a[c * m_ + k];
          inv[r * m_ + k] -= f * inv[c * m_ + k];
        }
      }
    }
    // Store column-major: binv_[col * m + row].
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t c = 0; c < m_; ++c) binv_[c * m_ + r] = inv[r * m_ + c];
    }
    since_refactor_ = 0;
    recompute_basic_values();
  }

  void pivot(std::size_t r, std::size_t entering) {
    const double wr = w_[r];
    for (std::size_t c = 0; c < m_; ++c) {
      double* col = &binv_[c * m_];
      const double p = col[r] / wr;
      if (p != 0.0) {
        for (std::size_t i = 0; i < m_; ++i) col[i] -= w_[i] * p;
      }
      col[r] = p;
    }
    basis_[r] = static_cast<int>(entering);
    state_[entering] = VarState::Basic;
    if (++since_refactor_ >= opt_.refactor_interval) refactor();
  }

  void compute_duals() {
    for (std::size_t c = 0; c < m_; ++c) {
      const double* col = &binv_[c * m_];
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += cost_[static_cast<std::size_t>(basis_[i])] * col[i];
      y_[c] = s;
    }
    for (std::size_t j = 0; j < ncols(); ++j) {
      d_[j] = state_[j] == VarState::Basic ? 0.0 : cost_[j] - dot_column(j, y_);
    }
  }

  void note_step(double step) {
    if (step <= 1e-12 && ++degenerate_ > 5 * static_cast<long>(m_ + n_)) bland_ = true;
  }

  bool fixed(std::size_t j) const { return lo_[j] == hi_[j]; }

  double bound_violation(std::size_t j) const {
    const double v = x_[j];
    if (v < lo_[j] - opt_.primal_tol * (1.0 + std::abs(lo_[j]))) return lo_[j] - v;
    if (v > hi_[j] + opt_.primal_tol * (1.0 + std::abs(hi_[j]))) return v - hi_[j];
    return 0.0;
  }

  bool dual_feasible() {
    compute_duals();
    const double tol = 1e-7 * (1.0 + max_cost_);
    for (std::size_t j = 0; j < ncols(); ++j) {
      if (state_[j] == VarState::Basic || fixed(j)) continue;
      if (state_[j] == VarState::AtLower && d_[j] < -tol) return false;
      if (state_[j] == VarState::AtUpper && d_[j] > tol) return false;
      if (state_[j] == VarState::Free && std::abs(d_[j]) > tol) return false;
    }
    return true;
  }

  PhaseOutcome dual_simplex() {
    refactor();
    std::vector<double> alpha(ncols(), 0.0);
    std::vector<double> rho(m_, 0.0);
    for (;;) {
      if (iterations_ >= opt_.max_iterations) return PhaseOutcome::IterationLimit;
      // Leaving row: largest bound violation (Bland: lowest column index).
      std::size_t r = m_;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t j = static_cast<std::size_t>(basis_[i]);
        const double viol = bound_violation(j);
        if (viol <= 0.0) continue;
        if (bland_) {
          if (r == m_ || basis_[i] < basis_[r]) r = i;
        } else if (viol > best) {
          best = viol;
          r = i;
        }
      }
      if (r == m_) return PhaseOutcome::Optimal;

      compute_duals();
      const std::size_t leaving = static_cast<std::size_t>(basis_[r]);
      const bool to_lower = x_[leaving] < lo_[leaving];
      const double target = to_lower ? lo_[leaving] : hi_[leaving];
      for (std::size_t c = 0; c < m_; ++c) rho[c] = binv_[c * m_ + r];

      std::size_t entering = ncols();
      double best_ratio = kInf;
      double best_alpha = 0.0;
      for (std::size_t j = 0; j < ncols(); ++j) {
        if (state_[j] == VarState::Basic || fixed(j)) continue;
        const double a = dot_column(j, rho);
        alpha[j] = a;
        if (std::abs(a) <= opt_.pivot_tol) continue;
        // x_leaving moves by -a per unit increase of x_j.
        bool eligible = false;
        switch (state_[j]) {
          case VarState::AtLower: eligible = to_lower ? a < 0.0 : a > 0.0; break;
          case VarState::AtUpper: eligible = to_lower ? a > 0.0 : a < 0.0; break;
          case VarState::Free: eligible = true; break;
          case VarState::Basic: break;
        }
        if (!eligible) continue;
        const double ratio = std::abs(d_[j]) / std::abs(a);
        const double tie = std::isfinite(best_ratio) ? 1e-12 * (1.0 + best_ratio) : 0.0;
        if (ratio < best_ratio - tie) {
          best_ratio = ratio;
          best_alpha = std::abs(a);
          entering = j;
        } else if (ratio <= best_ratio + tie && !bland_ && std::abs(a) > best_alpha) {
          best_alpha = std::abs(a);
          entering = j;
        }
      }
      if (entering == ncols()) return PhaseOutcome::Infeasible;

      ftran(entering, w_);
      const double delta = (x_[leaving] - target) / w_[r];
      for (std::size_t i = 0; i < m_; ++i) {
        x_[static_cast<std::size_t>(basis_[i])] -= w_[i] * delta;
      }
      x_[entering] += delta;
      x_[leaving] = target;
      state_[leaving] = to_lower ? VarState::AtLower : VarState::AtUpper;
      ++iterations_;
      note_step(best_ratio);
      pivot(r, entering);
    }
  }

  PhaseOutcome primal_simplex() {
    refactor();
    for (;;) {
      if (iterations_ >= opt_.max_iterations) return PhaseOutcome::IterationLimit;
      compute_duals();
      std::size_t entering = ncols();
      double best = 0.0;
      for (std::size_t j = 0; j < ncols(); ++j) {
        if (state_[j] == VarState::Basic || fixed(j)) continue;
        const double dj = d_[j];
        bool eligible = false;
        switch (state_[j]) {
          case VarState::AtLower: eligible = dj < -opt_.dual_tol; break;
          case VarState::AtUpper: eligible = dj > opt_.dual_tol; break;
          case VarState::Free: eligible = std::abs(dj) > opt_.dual_tol; break;
          case VarState::Basic: break;
        }
        if (!eligible) continue;
        if (bland_) {
          entering = j;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          entering = j;
        }
      }
      if (entering == ncols()) return PhaseOutcome::Optimal;

      const double dir = d_[entering] < 0.0 ? 1.0 : -1.0;
      ftran(entering, w_);
      double step = hi_[entering] - lo_[entering];  // bound flip distance (inf if unbounded)
      std::size_t r = m_;
      double best_w = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double wi = w_[i];
        if (std::abs(wi) <= opt_.pivot_tol) continue;
        const std::size_t j = static_cast<std::size_t>(basis_[i]);
        const double rate = -dir * wi;  // change of x_j per unit step
        double limit;
        if (rate < 0.0) {
          if (!std::isfinite(lo_[j])) continue;
          limit = (x_[j] - lo_[j]) / -rate;
        } else {
          if (!std::isfinite(hi_[j])) continue;
          limit = (hi_[j] - x_[j]) / rate;
        }
        limit = std::max(limit, 0.0);
        const double tie = std::isfinite(step) ? 1e-12 * (1.0 + std::abs(step)) : 0.0;
        if (limit < step - tie) {
          step = limit;
          r = i;
          best_w = std::abs(wi);
        } else if (r != m_ && limit <= step + tie) {
          const bool better = bland_ ? basis_[i] < basis_[r] : std::abs(wi) > best_w;
          if (better) {
            r = i;
            best_w = std::abs(wi);
          }
        }
      }
      if (!std::isfinite(step)) return PhaseOutcome::Unbounded;

      for (std::size_t i = 0; i < m_; ++i) {
        x_[static_cast<std::size_t>(basis_[i])] -= dir * step * w_[i];
      }
      x_[entering] += dir * step;
      ++iterations_;
      note_step(step);
      if (r == m_) {
        state_[entering] = dir > 0.0 ? VarState::AtUpper : VarState::AtLower;
        x_[entering] = dir > 0.0 ? hi_[entering] : lo_[entering];
        continue;
      }
      const std::size_t leaving = static_cast<std::size_t>(basis_[r]);
      const bool hits_lower = -dir * w_[r] < 0.0;
      if (fixed(leaving) || hits_lower) {
        state_[leaving] = VarState::AtLower;
        x_[leaving] = lo_[leaving];
      } else {
        state_[leaving] = VarState::AtUpper;
        x_[leaving] = hi_[leaving];
      }
      pivot(r, entering);
    }
  }

  PhaseOutcome two_phase_primal() {
    reset_slack_basis();
    for (std::size_t j = 0; j < n_; ++j) park_nonbasic(j, 0.0);
    // Residual each slack would have to absorb.
    std::vector<double> resid = rhs_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        resid[static_cast<std::size_t>(col_row_[e])] -= col_val_[e] * x_[j];
      }
    }
    std::vector<std::size_t> artificials;
    std::vector<double> art_sign;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      if (resid[i] >= lo_[s] && resid[i] <= hi_[s]) {
        state_[s] = VarState::Basic;
        continue;
      }
      const double parked = std::clamp(resid[i], lo_[s], hi_[s]);
      const double sign = resid[i] - parked > 0.0 ? 1.0 : -1.0;
      add_column({static_cast<int>(i)}, {sign});
      lo_.push_back(0.0);
      hi_.push_back(kInf);
      true_cost_.push_back(0.0);
      const std::size_t a = ncols() - 1;
      state_[s] = parked == lo_[s] ? VarState::AtLower : VarState::AtUpper;
      x_[s] = parked;
      state_.push_back(VarState::Basic);
      x_.push_back(0.0);
      d_.push_back(0.0);
      basis_[i] = static_cast<int>(a);
      artificials.push_back(a);
      art_sign.push_back(sign);
    }

    if (!artificials.empty()) {
      cost_.assign(ncols(), 0.0);
      for (std::size_t a : artificials) cost_[a] = 1.0;
      refactor();
      const PhaseOutcome p1 = primal_simplex();
      if (p1 == PhaseOutcome::IterationLimit) return p1;
      double infeasibility = 0.0;
      for (std::size_t a : artificials) infeasibility += x_[a];
      if (infeasibility > 1e-8 * (1.0 + max_rhs_)) return PhaseOutcome::Infeasible;
      for (std::size_t a : artificials) {
        hi_[a] = 0.0;
        if (state_[a] != VarState::Basic) {
          state_[a] = VarState::AtLower;
          x_[a] = 0.0;
        }
      }
    }
    cost_ = true_cost_;
    cost_.resize(ncols(), 0.0);
    return primal_simplex();
  }

  void extract(LpSolution& sol) {
    cost_ = true_cost_;
    cost_.resize(ncols(), 0.0);
    compute_duals();
    const double flip = lp_.sense == ObjectiveSense::Maximize ? -1.0 : 1.0;
    sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    sol.duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) sol.duals[i] = flip * y_[i];
    sol.reduced_costs.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) sol.reduced_costs[j] = flip * (true_cost_[j] - dot_column(j, y_));
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) sol.objective += lp_.objective[j] * sol.x[j];
  }

  const LinearProgram& lp_;
  LpOptions opt_;
  std::size_t m_ = 0;
  std::size_t n_ = 0;

  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;

  std::vector<double> lo_, hi_, rhs_;
  std::vector<double> true_cost_;  // minimization form
  std::vector<double> cost_;       // active phase
  double max_cost_ = 0.0;
  double max_rhs_ = 0.0;

  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
  std::vector<double> binv_;  // column-major
  std::vector<double> w_, y_, d_;

  long iterations_ = 0;
  long degenerate_ = 0;
  bool bland_ = false;
  int since_refactor_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  Simplex simplex(lp, options);
  return simplex.run();
}

namespace {

// Maximization-form view: c' = s*c, y' = s*y with s = -1 for minimization.
double sense_sign(const LinearProgram& lp) {
  return lp.sense == ObjectiveSense::Maximize ? 1.0 : -1.0;
}

std::vector<double> row_activity(const LinearProgram& lp, const std::vector<double>& x) {
  std::vector<double> act(lp.num_rows(), 0.0);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    for (const LpTerm& t : lp.rows[i].terms) act[i] += t.coeff * x[static_cast<std::size_t>(t.var)];
  }
  return act;
}

std::vector<double> reduced_costs_max_form(const LinearProgram& lp, const std::vector<double>& y) {
  const double s = sense_sign(lp);
  std::vector<double> z(lp.num_vars());
  for (std::size_t j = 0; j < lp.num_vars(); ++j) z[j] = s * lp.objective[j];
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    for (const LpTerm& t : lp.rows[i].terms) z[static_cast<std::size_t>(t.var)] -= t.coeff * s * y[i];
  }
  return z;
}

}  // namespace

double dual_objective(const LinearProgram& lp, const LpSolution& sol) {
  const double s = sense_sign(lp);
  const std::vector<double> z = reduced_costs_max_form(lp, sol.duals);
  double obj = 0.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) obj += lp.rows[i].rhs * s * sol.duals[i];
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (z[j] > 0.0 && std::isfinite(lp.upper[j])) obj += z[j] * lp.upper[j];
    if (z[j] < 0.0 && std::isfinite(lp.lower[j])) obj += z[j] * lp.lower[j];
  }
  return s * obj;
}

LpResiduals lp_residuals(const LinearProgram& lp, const LpSolution& sol) {
  LpResiduals res;
  const double s = sense_sign(lp);
  double cmax = 0.0;
  for (double c : lp.objective) cmax = std::max(cmax, std::abs(c));
  const double cscale = 1.0 + cmax;

  const std::vector<double> act = row_activity(lp, sol.x);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const LpRow& row = lp.rows[i];
    const double slack = row.rhs - act[i];
    double viol = 0.0;
    if (row.sense == RowSense::LessEqual) viol = std::max(0.0, -slack);
    if (row.sense == RowSense::GreaterEqual) viol = std::max(0.0, slack);
    if (row.sense == RowSense::Equal) viol = std::abs(slack);
    const double bscale = 1.0 + std::abs(row.rhs);
    res.primal = std::max(res.primal, viol / bscale);

    const double y = s * sol.duals[i];
    double sign_viol = 0.0;
    if (row.sense == RowSense::LessEqual) sign_viol = std::max(0.0, -y);
    if (row.sense == RowSense::GreaterEqual) sign_viol = std::max(0.0, y);
    res.dual = std::max(res.dual, sign_viol / cscale);
    res.complementary = std::max(res.complementary, std::abs(y * slack) / (cscale * bscale));
  }
  const std::vector<double> z = reduced_costs_max_form(lp, sol.duals);
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    const double x = sol.x[j];
    res.primal = std::max(res.primal, std::max(0.0, lo - x) / (1.0 + std::abs(lo)));
    res.primal = std::max(res.primal, std::max(0.0, x - hi) / (1.0 + std::abs(hi)));
    if (z[j] > 0.0) {
      if (!std::isfinite(hi)) {
        res.dual = std::max(res.dual, z[j] / cscale);
      } else {
        res.complementary = std::max(res.complementary, z[j] * (hi - x) / (cscale * (1.0 + std::abs(hi))));
      }
    } else if (z[j] < 0.0) {
      if (!std::isfinite(lo)) {
        res.dual = std::max(res.dual, -z[j] / cscale);
      } else {
        res.complementary = std::max(res.complementary, -z[j] * (x - lo) / (cscale * (1.0 + std::abs(lo))));
      }
    }
  }
  const double primal_obj = sol.objective;
  res.duality_gap = std::abs(primal_obj - dual_objective(lp, sol)) / (1.0 + std::abs(primal_obj));
  return res;
}

}  // namespace gridsched
