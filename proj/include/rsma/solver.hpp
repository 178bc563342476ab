#pragma once

// Convex per-iteration subproblem of the alternating optimization: minimize
// the weighted augmented MSEs over the precoder P and common-rate variables
// x = -r, for fixed equalizers and weights. With (f, mu) fixed every AWMSE is
// a convex quadratic in the realified precoder entries, so the whole thing is
// a small dense QCQP (~6N+2 real variables, <= 7 constraints):
//
//   min  sum_u v_u (x_u + zeta_u^u(P))
//   s.t. x_1 + x_2 + 1 >= zeta_u^12(P)      for each user   (common-rate)
//        x_u + zeta_u^u(P) <= 1 - R_u^th    for each user   (rate floor)
//        tr(P P^H) <= P_t                                    (power)
//        x <= 0
//
// Solved by a log-barrier interior-point method with Newton centering
// (reduction factor 10, at most 200 Newton steps), a strictly feasible start
// constructed by scaling a precoder into the power ball and backing the x off
// their bounds, and a phase-one pass that minimizes the worst violation when
// no strict start is found. Infeasibility is declared when the phase-one
// optimum exceeds 1e-6.
//
// Degenerate schemes (SDMA, NOMA) pin precoder columns and/or x entries; the
// masked variables are eliminated rather than constrained, which keeps the
// barrier away from zero-volume feasible sets.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsma/ratecore.hpp"

namespace rsma {

struct SubproblemInput {
  UserChannels channels;
  Equalizers equalizers;
  StreamWeights weights;
  std::array<double, kNumUsers> user_weights{0.5, 0.5};
  double power_budget = 1.0;
  std::array<double, kNumUsers> rate_floor{0.0, 0.0};
  double sigma2 = 1.0;

  // Scheme structure: inactive columns are forced to zero and removed from
  // the variable set; pinned x entries are fixed at zero.
  std::array<bool, 3> column_active{true, true, true};
  std::array<bool, kNumUsers> x_fixed_zero{false, false};

  std::optional<Precoder> initial_precoder;  // warm-start hint

  void validate() const {
    if (channels[0].size() == 0 || channels[0].size() != channels[1].size())
      throw std::invalid_argument("SubproblemInput: bad channel dimensions");
    if (!(power_budget > 0.0)) throw std::invalid_argument("SubproblemInput: power budget must be > 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("SubproblemInput: sigma2 must be > 0");
    for (int u = 0; u < kNumUsers; ++u) {
      if (!(rate_floor[u] >= 0.0))
        throw std::invalid_argument("SubproblemInput: rate floors must be >= 0");
      if (!(user_weights[u] >= 0.0))
        throw std::invalid_argument("SubproblemInput: user weights must be >= 0");
      if (column_active[kCommonColumn]) {
        if (!(weights.common[u] > 0.0))
          throw std::invalid_argument("SubproblemInput: AWMSE weights must be > 0");
      }
      if (column_active[private_column(u)] && !(weights.priv[u] > 0.0))
        throw std::invalid_argument("SubproblemInput: AWMSE weights must be > 0");
    }
    if (!column_active[kCommonColumn] && (!x_fixed_zero[0] || !x_fixed_zero[1]))
      throw std::invalid_argument(
          "SubproblemInput: without a common stream both x entries must be pinned");
    if (initial_precoder && initial_precoder->rows() != channels[0].size())
      throw std::invalid_argument("SubproblemInput: warm-start precoder has wrong row count");
  }
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations };

struct SubproblemSolution {
  Precoder precoder;
  std::array<double, kNumUsers> x{0.0, 0.0};
  double objective = 0.0;
  double max_violation = 0.0;
  double kkt_residual = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  int newton_steps = 0;
  Eigen::VectorXd duals;   // barrier multiplier estimates, constraint order
  double barrier_t = 0.0;  // final barrier parameter
};

namespace detail {

// f(z) = 0.5 z'Qz + b'z + c with Q symmetric PSD.
struct QuadFn {
  Eigen::MatrixXd Q;
  Eigen::VectorXd b;
  double c = 0.0;

  explicit QuadFn(int n) : Q(Eigen::MatrixXd::Zero(n, n)), b(Eigen::VectorXd::Zero(n)) {}
  double value(const Eigen::VectorXd& z) const { return 0.5 * z.dot(Q * z) + b.dot(z) + c; }
  Eigen::VectorXd grad(const Eigen::VectorXd& z) const { return Q * z + b; }
};

inline constexpr double kFeasTol = 1e-7;
inline constexpr double kStatTol = 1e-6;
inline constexpr double kBarrierFactor = 10.0;
inline constexpr double kBarrierTFinal = 1e8;
inline constexpr int kMaxNewtonSteps = 200;
inline constexpr double kPhaseOneInfeasible = 1e-6;

// Realified problem: variable vector z stacks [Re p_c; Im p_c] for each
// active column c in order, followed by the free x entries.
class SubproblemForm {
 public:
  explicit SubproblemForm(const SubproblemInput& in) : in_(in), n_(static_cast<int>(in.channels[0].size())) {
    // A vanishing equalizer zeroes the stream's quadratic exactly.
    for (int u = 0; u < kNumUsers; ++u) {
      if (std::abs(in_.equalizers.common[u]) <= 1e-12) in_.equalizers.common[u] = 0.0;
      if (std::abs(in_.equalizers.priv[u]) <= 1e-12) in_.equalizers.priv[u] = 0.0;
    }
    col_active_ = in_.column_active;
    x_pinned_ = in_.x_fixed_zero;

    // With both common equalizers at zero the AWMSEs zeta_u^12 are constants
    // >= 1, so the common-rate constraints degenerate to sum(x) >= c >= 0
    // while x <= 0: the x block has no interior. Pin it at its forced value
    // (zero) and drop the dead common column; anything else is infeasible.
    if (col_active_[kCommonColumn] && in_.equalizers.common[0] == 0.0 &&
        in_.equalizers.common[1] == 0.0 && !(x_pinned_[0] && x_pinned_[1])) {
      double c = 0.0;
      double ub_sum = 0.0;
      for (int u = 0; u < kNumUsers; ++u) {
        const double mu = in_.weights.common[u];
        c = std::max(c, mu - std::log2(mu) - 1.0);
        if (!x_pinned_[u] && !col_active_[private_column(u)]) ub_sum -= in_.rate_floor[u];
      }
      if (c > ub_sum + 1e-9) {
        structurally_infeasible_ = true;
        infeasible_reason_ = "common equalizers are zero but the rate variables must cover " +
                             std::to_string(c);
      } else {
        col_active_[kCommonColumn] = false;
        x_pinned_ = {true, true};
      }
    }

    int off = 0;
    for (int c = 0; c < 3; ++c) {
      col_offset_[c] = col_active_[c] ? off : -1;
      if (col_active_[c]) off += 2 * n_;
    }
    precoder_dim_ = off;
    for (int u = 0; u < kNumUsers; ++u) {
      x_offset_[u] = x_pinned_[u] ? -1 : off;
      if (!x_pinned_[u]) ++off;
    }
    dim_ = off;

    for (int u = 0; u < kNumUsers; ++u) {
      const auto& h = in_.channels[u];
      dir1_[u].resize(2 * n_);
      dir2_[u].resize(2 * n_);
      dir1_[u] << h.real(), h.imag();
      dir2_[u] << -h.imag(), h.real();
      outer_[u] = dir1_[u] * dir1_[u].transpose() + dir2_[u] * dir2_[u].transpose();
    }
    build();
  }

  int dim() const { return dim_; }
  bool structurally_infeasible() const { return structurally_infeasible_; }
  const std::string& infeasible_reason() const { return infeasible_reason_; }
  const QuadFn& objective() const { return *objective_; }
  const std::vector<QuadFn>& constraints() const { return constraints_; }
  const SubproblemInput& input() const { return in_; }

  Eigen::VectorXd pack(const Precoder& p, const std::array<double, kNumUsers>& x) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim_);
    for (int c = 0; c < 3; ++c) {
      if (col_offset_[c] < 0) continue;
      z.segment(col_offset_[c], n_) = p.col(c).real();
      z.segment(col_offset_[c] + n_, n_) = p.col(c).imag();
    }
    for (int u = 0; u < kNumUsers; ++u)
      if (x_offset_[u] >= 0) z(x_offset_[u]) = x[u];
    return z;
  }

  Precoder precoder_from(const Eigen::VectorXd& z) const {
    Precoder p = Precoder::Zero(n_, 3);
    for (int c = 0; c < 3; ++c) {
      if (col_offset_[c] < 0) continue;
      p.col(c).real() = z.segment(col_offset_[c], n_);
      p.col(c).imag() = z.segment(col_offset_[c] + n_, n_);
    }
    return p;
  }

  std::array<double, kNumUsers> x_from(const Eigen::VectorXd& z) const {
    std::array<double, kNumUsers> x{0.0, 0.0};
    for (int u = 0; u < kNumUsers; ++u)
      if (x_offset_[u] >= 0) x[u] = z(x_offset_[u]);
    return x;
  }

  // Strictly feasible start: tries the warm-start precoder, a blend with the
  // matched-filter default, the default itself, and finally the origin,
  // backing the x entries off their bounds with half the available margin.
  bool strict_start(Eigen::VectorXd& z_out) const {
    std::vector<Precoder> candidates;
    const Precoder fallback = default_precoder();
    if (in_.initial_precoder) {
      Precoder w = scaled_into_ball(*in_.initial_precoder);
      candidates.push_back(w);
      candidates.push_back(scaled_into_ball(0.75 * w + 0.25 * fallback));
    }
    candidates.push_back(fallback);
    candidates.push_back(0.5 * fallback);
    candidates.push_back(Precoder::Zero(n_, 3));
    for (const auto& cand : candidates) {
      Eigen::VectorXd z;
      if (try_start_at(cand, z)) {
        z_out = z;
        return true;
      }
    }
    return false;
  }

 private:
  // Constraints that lost every variable term are resolved here rather than
  // handed to the barrier, which needs a nonempty strict interior.
  void push_constraint(QuadFn g, const std::string& label) {
    if (g.Q.lpNorm<Eigen::Infinity>() == 0.0 && g.b.lpNorm<Eigen::Infinity>() == 0.0) {
      if (g.c > 1e-12) {
        structurally_infeasible_ = true;
        infeasible_reason_ = "constraint '" + label + "' is unsatisfiable by " +
                             std::to_string(g.c);
      }
      return;
    }
    constraints_.push_back(std::move(g));
    labels_.push_back(label);
  }

  void build() {
    objective_.emplace(dim_);
    QuadFn& f0 = *objective_;
    for (int u = 0; u < kNumUsers; ++u) {
      const double v = in_.user_weights[u];
      if (col_active_[private_column(u)]) {
        accumulate_zeta_priv(f0, u, v);
      } else {
        f0.c += v;  // dead private stream contributes zeta = 1
      }
      if (x_offset_[u] >= 0) f0.b(x_offset_[u]) += v;
    }

    // Common-rate constraints: zeta_u^12(P) - x1 - x2 - 1 <= 0.
    if (col_active_[kCommonColumn]) {
      for (int u = 0; u < kNumUsers; ++u) {
        QuadFn g(dim_);
        accumulate_zeta_common(g, u, 1.0);
        for (int j = 0; j < kNumUsers; ++j)
          if (x_offset_[j] >= 0) g.b(x_offset_[j]) -= 1.0;
        g.c -= 1.0;
        push_constraint(std::move(g), "common-rate u" + std::to_string(u + 1));
      }
    }

    // Rate floors: x_u + zeta_u^u(P) <= 1 - R_th.
    for (int u = 0; u < kNumUsers; ++u) {
      const double r_th = in_.rate_floor[u];
      const bool priv_active = col_active_[private_column(u)];
      if (priv_active) {
        QuadFn g(dim_);
        accumulate_zeta_priv(g, u, 1.0);
        if (x_offset_[u] >= 0) g.b(x_offset_[u]) += 1.0;
        g.c -= 1.0 - r_th;
        push_constraint(std::move(g), "rate-floor u" + std::to_string(u + 1));
      } else if (x_offset_[u] >= 0) {
        if (r_th > 0.0) {
          QuadFn g(dim_);
          g.b(x_offset_[u]) = 1.0;
          g.c = r_th;
          push_constraint(std::move(g), "rate-floor u" + std::to_string(u + 1));
          floor_dominates_sign_[u] = true;
        }
      } else if (r_th > 1e-12) {
        // No private stream and no common share for this user: the floor can
        // never be met.
        structurally_infeasible_ = true;
        infeasible_reason_ = "rate floor of user " + std::to_string(u + 1) +
                             " cannot be met without any assigned stream";
      }
    }

    // Power budget: |P|_F^2 - P_t <= 0.
    if (precoder_dim_ > 0) {
      QuadFn g(dim_);
      g.Q.topLeftCorner(precoder_dim_, precoder_dim_) =
          2.0 * Eigen::MatrixXd::Identity(precoder_dim_, precoder_dim_);
      g.c = -in_.power_budget;
      push_constraint(std::move(g), "power");
    }

    // Sign constraints x_u <= 0, unless a floor constraint already dominates.
    for (int u = 0; u < kNumUsers; ++u) {
      if (x_offset_[u] < 0 || floor_dominates_sign_[u]) continue;
      QuadFn g(dim_);
      g.b(x_offset_[u]) = 1.0;
      push_constraint(std::move(g), "x-sign u" + std::to_string(u + 1));
    }
  }

  // zeta_u^12 = mu (|f|^2 T_u^12 - 2 Re(f h^H p_12) + 1) - log2(mu), with
  // T_u^12 summing the active beam powers plus noise.
  void accumulate_zeta_common(QuadFn& q, int u, double scale) {
    const double mu = in_.weights.common[u];
    const Complex f = in_.equalizers.common[u];
    const double w = scale * mu * std::norm(f);
    for (int c = 0; c < 3; ++c)
      if (col_offset_[c] >= 0) add_beam_power(q, u, c, w);
    add_linear(q, u, kCommonColumn, -2.0 * scale * mu, f);
    q.c += scale * (mu * (std::norm(f) * in_.sigma2 + 1.0) - std::log2(mu));
  }

  // zeta_u^u over T_u^u, which excludes the common beam.
  void accumulate_zeta_priv(QuadFn& q, int u, double scale) {
    const double mu = in_.weights.priv[u];
    const Complex f = in_.equalizers.priv[u];
    const double w = scale * mu * std::norm(f);
    for (int c = 1; c < 3; ++c)
      if (col_offset_[c] >= 0) add_beam_power(q, u, c, w);
    add_linear(q, u, private_column(u), -2.0 * scale * mu, f);
    q.c += scale * (mu * (std::norm(f) * in_.sigma2 + 1.0) - std::log2(mu));
  }

  // weight * |h_u^H p_c|^2
  void add_beam_power(QuadFn& q, int u, int c, double weight) const {
    if (weight == 0.0) return;
    q.Q.block(col_offset_[c], col_offset_[c], 2 * n_, 2 * n_) += 2.0 * weight * outer_[u];
  }

  // scale * Re(f * h_u^H p_c), linear in the realified column c.
  void add_linear(QuadFn& q, int u, int c, double scale, Complex f) const {
    if (col_offset_[c] < 0) return;
    q.b.segment(col_offset_[c], 2 * n_) += scale * (f.real() * dir1_[u] - f.imag() * dir2_[u]);
  }

  Precoder scaled_into_ball(const Precoder& p) const {
    const double tr = p.squaredNorm();
    const double cap = 0.98 * in_.power_budget;
    Precoder q = p;
    for (int c = 0; c < 3; ++c)
      if (col_offset_[c] < 0) q.col(c).setZero();
    const double tr2 = q.squaredNorm();
    if (tr2 > cap && tr2 > 0.0) q *= std::sqrt(cap / tr2);
    (void)tr;
    return q;
  }

  // Matched-filter style default: each active private column points at its
  // user, the common column at the sum direction.
  Precoder default_precoder() const {
    Precoder p = Precoder::Zero(n_, 3);
    int active = 0;
    for (int c = 0; c < 3; ++c) active += col_active_[c] ? 1 : 0;
    if (active == 0) return p;
    const double col_power = 0.9 * in_.power_budget / active;
    auto unit_or_e1 = [&](const Eigen::VectorXcd& v) {
      const double nv = v.norm();
      if (nv > 0.0) return Eigen::VectorXcd(v / nv);
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n_);
      e(0) = 1.0;
      return e;
    };
    if (col_active_[kCommonColumn]) {
      Eigen::VectorXcd sum =
          unit_or_e1(in_.channels[0]) + unit_or_e1(in_.channels[1]);
      if (sum.norm() < 1e-12) sum = unit_or_e1(in_.channels[0]);
      p.col(kCommonColumn) = std::sqrt(col_power) * unit_or_e1(sum);
    }
    for (int u = 0; u < kNumUsers; ++u)
      if (col_active_[private_column(u)])
        p.col(private_column(u)) = std::sqrt(col_power) * unit_or_e1(in_.channels[u]);
    return p;
  }

  bool try_start_at(const Precoder& p, Eigen::VectorXd& z_out) const {
    std::array<double, kNumUsers> x{0.0, 0.0};
    // Upper bounds on the free x entries.
    double ub[kNumUsers] = {0.0, 0.0};
    int n_free = 0;
    for (int u = 0; u < kNumUsers; ++u) {
      if (x_offset_[u] < 0) continue;
      ++n_free;
      double bound = 0.0;  // x_u <= 0
      if (col_active_[private_column(u)])
        bound = std::min(bound, (1.0 - in_.rate_floor[u]) - zeta_priv_value(p, u));
      else
        bound = std::min(bound, -in_.rate_floor[u]);
      ub[u] = bound;
    }
    if (col_active_[kCommonColumn] && n_free > 0) {
      double zeta12 = 0.0;
      for (int u = 0; u < kNumUsers; ++u) zeta12 = std::max(zeta12, zeta_common_value(p, u));
      double margin = -(zeta12 - 1.0);
      for (int u = 0; u < kNumUsers; ++u)
        if (x_offset_[u] >= 0) margin += ub[u];
      if (margin < 1e-7) return false;
      for (int u = 0; u < kNumUsers; ++u)
        if (x_offset_[u] >= 0) x[u] = ub[u] - margin / (2.0 * n_free);
    } else {
      for (int u = 0; u < kNumUsers; ++u)
        if (x_offset_[u] >= 0) x[u] = ub[u] - 1.0;
    }
    Eigen::VectorXd z = pack(p, x);
    for (const auto& g : constraints_)
      if (!(g.value(z) < -1e-12 * std::max(1.0, std::abs(g.c)))) return false;
    z_out = z;
    return true;
  }

  double zeta_common_value(const Precoder& p, int u) const {
    const double mu = in_.weights.common[u];
    const Complex f = in_.equalizers.common[u];
    double t = in_.sigma2;
    for (int c = 0; c < 3; ++c)
      if (col_offset_[c] >= 0) t += std::norm(in_.channels[u].dot(p.col(c)));
    const double eps = stream_mse(f, t, in_.channels[u].dot(p.col(kCommonColumn)));
    return awmse(eps, mu);
  }

  double zeta_priv_value(const Precoder& p, int u) const {
    const double mu = in_.weights.priv[u];
    const Complex f = in_.equalizers.priv[u];
    double t = in_.sigma2;
    for (int c = 1; c < 3; ++c)
      if (col_offset_[c] >= 0) t += std::norm(in_.channels[u].dot(p.col(c)));
    const double eps = stream_mse(f, t, in_.channels[u].dot(p.col(private_column(u))));
    return awmse(eps, mu);
  }

  SubproblemInput in_;
  int n_;
  int dim_ = 0;
  int precoder_dim_ = 0;
  std::array<bool, 3> col_active_{true, true, true};
  std::array<bool, kNumUsers> x_pinned_{false, false};
  std::array<int, 3> col_offset_{-1, -1, -1};
  std::array<int, kNumUsers> x_offset_{-1, -1};
  std::array<Eigen::VectorXd, kNumUsers> dir1_, dir2_;
  std::array<Eigen::MatrixXd, kNumUsers> outer_;
  std::optional<QuadFn> objective_;
  std::vector<QuadFn> constraints_;
  std::vector<std::string> labels_;
  std::array<bool, kNumUsers> floor_dominates_sign_{false, false};
  bool structurally_infeasible_ = false;
  std::string infeasible_reason_;
};

// Newton centering of psi(z) = t*f0(z) - sum_i ln(-g_i(z)) from a strictly
// feasible z. Stops on the Newton decrement (threshold scales with t, since
// psi does), an optional gradient target, or the step budget. Returns the
// number of steps taken.
inline int newton_center(const QuadFn* f0, const std::vector<QuadFn>& cons, double t,
                         Eigen::VectorXd& z, int step_budget, double decrement2_tol,
                         double grad_inf_target = 0.0) {
  const int n = static_cast<int>(z.size());
  const int m = static_cast<int>(cons.size());
  Eigen::VectorXd slack(m), grad(n), step(n);
  Eigen::MatrixXd hess(n, n);

  auto psi = [&](const Eigen::VectorXd& y, bool& feasible) {
    double val = f0 ? t * f0->value(y) : 0.0;
    feasible = true;
    for (const auto& g : cons) {
      const double s = -g.value(y);
      if (!(s > 0.0)) {
        feasible = false;
        return 0.0;
      }
      val -= std::log(s);
    }
    return val;
  };

  int steps = 0;
  while (steps < step_budget) {
    grad = f0 ? Eigen::VectorXd(t * f0->grad(z)) : Eigen::VectorXd::Zero(n);
    hess = f0 ? Eigen::MatrixXd(t * f0->Q) : Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < m; ++i) {
      slack(i) = -cons[i].value(z);
      const Eigen::VectorXd gi = cons[i].grad(z);
      grad += gi / slack(i);
      hess += cons[i].Q / slack(i);
      hess += (gi * gi.transpose()) / (slack(i) * slack(i));
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    step = -ldlt.solve(grad);
    if (!step.allFinite()) {
      hess.diagonal().array() += 1e-8 * (1.0 + hess.diagonal().maxCoeff());
      step = -Eigen::LDLT<Eigen::MatrixXd>(hess).solve(grad);
      if (!step.allFinite()) break;
    }
    const double decrement2 = -grad.dot(step);
    const double grad_inf = grad.lpNorm<Eigen::Infinity>();
    if (decrement2 <= decrement2_tol && (grad_inf_target <= 0.0 || grad_inf <= grad_inf_target))
      break;

    bool base_feasible = true;
    const double psi0 = psi(z, base_feasible);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      bool feasible = false;
      const Eigen::VectorXd trial = z + alpha * step;
      const double val = psi(trial, feasible);
      if (feasible && val <= psi0 + 0.25 * alpha * grad.dot(step)) {
        z = trial;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    ++steps;
    if (!moved) break;  // stalled line search; already at numerical precision
  }
  return steps;
}

struct PhaseOneResult {
  Eigen::VectorXd z;
  double worst_violation = 0.0;
  int newton_steps = 0;
};

// Minimize the worst constraint violation s over (z, s). Stops early once a
// comfortably interior point appears.
inline PhaseOneResult phase_one(const SubproblemForm& form) {
  const int n = form.dim();
  const auto& cons = form.constraints();
  const int m = static_cast<int>(cons.size());

  QuadFn f0(n + 1);
  f0.b(n) = 1.0;
  std::vector<QuadFn> lifted;
  lifted.reserve(m + 1);
  for (const auto& g : cons) {
    QuadFn gg(n + 1);
    gg.Q.topLeftCorner(n, n) = g.Q;
    gg.b.head(n) = g.b;
    gg.b(n) = -1.0;
    gg.c = g.c;
    lifted.push_back(std::move(gg));
  }
  QuadFn bound(n + 1);  // s >= -10 keeps the problem bounded
  bound.b(n) = -1.0;
  bound.c = -10.0;
  lifted.push_back(std::move(bound));

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n + 1);
  double worst = 0.0;
  for (const auto& g : cons) worst = std::max(worst, g.value(z.head(n)));
  z(n) = worst + 1.0;

  PhaseOneResult out;
  int used = 0;
  for (double t = 1.0; t <= 1e9 && used < 2 * kMaxNewtonSteps; t *= kBarrierFactor) {
    used += newton_center(&f0, lifted, t, z, 2 * kMaxNewtonSteps - used,
                          t >= 1e9 ? std::max(1e-10, 1e-9 * t) : 1e-2);
    double cur = -1e300;
    for (const auto& g : cons) cur = std::max(cur, g.value(z.head(n)));
    if (cur < -1e-4) break;  // strictly interior, good enough to hand off
  }
  out.z = z.head(n);
  out.worst_violation = -1e300;
  for (const auto& g : cons) out.worst_violation = std::max(out.worst_violation, g.value(out.z));
  out.newton_steps = used;
  return out;
}

}  // namespace detail

inline SubproblemSolution solve_subproblem(const SubproblemInput& in) {
  in.validate();
  detail::SubproblemForm form(in);
  const int n_antennas = static_cast<int>(in.channels[0].size());

  SubproblemSolution sol;
  sol.precoder = Precoder::Zero(n_antennas, 3);

  if (form.structurally_infeasible()) {
    sol.status = SolveStatus::Infeasible;
    sol.max_violation = 1.0;
    sol.objective = form.objective().value(Eigen::VectorXd::Zero(form.dim()));
    return sol;
  }

  if (form.dim() == 0) {
    // Everything pinned: the solution is the zero precoder with r = 0.
    sol.objective = form.objective().c;
    sol.status = SolveStatus::Optimal;
    return sol;
  }

  Eigen::VectorXd z;
  int used = 0;
  if (!form.strict_start(z)) {
    auto p1 = detail::phase_one(form);
    used += p1.newton_steps;
    if (p1.worst_violation >= 0.0) {
      sol.status = SolveStatus::Infeasible;
      sol.precoder = form.precoder_from(p1.z);
      sol.x = form.x_from(p1.z);
      sol.objective = form.objective().value(p1.z);
      sol.max_violation = std::max(p1.worst_violation, 0.0);
      sol.newton_steps = used;
      return sol;
    }
    z = p1.z;
  }

  const auto& cons = form.constraints();
  const int m = static_cast<int>(cons.size());
  double t = 1.0;
  for (;; t *= detail::kBarrierFactor) {
    const bool final_stage = t >= detail::kBarrierTFinal;
    // Intermediate stages only track the central path (Newton decrement
    // lambda <= 0.1); the last stage centers to machine precision, with the
    // line-search stall exit as the natural floor.
    const double dec_tol = final_stage ? 1e-12 : 1e-2;
    used += detail::newton_center(&form.objective(), cons, t, z,
                                  detail::kMaxNewtonSteps - used, dec_tol);
    if (final_stage || used >= detail::kMaxNewtonSteps) break;
  }

  sol.precoder = form.precoder_from(z);
  sol.x = form.x_from(z);
  sol.objective = form.objective().value(z);
  sol.newton_steps = used;
  sol.barrier_t = t;

  // The barrier multipliers 1/(t*s_i) certify optimality only up to the
  // rounding noise of the tiny active slacks; a least-squares refit over the
  // active set gives a clean certificate.
  double viol = 0.0;
  Eigen::VectorXd barrier_duals(m), slack(m);
  for (int i = 0; i < m; ++i) {
    const double s = -cons[i].value(z);
    slack(i) = s;
    viol = std::max(viol, -s);
    barrier_duals(i) = s > 0.0 ? 1.0 / (t * s) : 0.0;
  }
  std::vector<int> active;
  for (int i = 0; i < m; ++i)
    if (barrier_duals(i) > 1e-7) active.push_back(i);
  sol.duals = barrier_duals;
  if (!active.empty()) {
    Eigen::MatrixXd g_act(form.dim(), active.size());
    for (std::size_t k = 0; k < active.size(); ++k) g_act.col(k) = cons[active[k]].grad(z);
    Eigen::VectorXd fitted = g_act.colPivHouseholderQr().solve(-form.objective().grad(z));
    for (std::size_t k = 0; k < active.size(); ++k)
      sol.duals(active[k]) = std::max(fitted(static_cast<int>(k)), 0.0);
  }

  double stat = 0.0, comp = 0.0;
  Eigen::VectorXd lagr = form.objective().grad(z);
  for (int i = 0; i < m; ++i) {
    lagr += sol.duals(i) * cons[i].grad(z);
    comp = std::max(comp, sol.duals(i) * std::abs(slack(i)));
  }
  stat = lagr.lpNorm<Eigen::Infinity>();
  sol.max_violation = std::max(viol, 0.0);
  sol.kkt_residual = std::max({stat, comp, sol.max_violation});

  const bool converged = used < detail::kMaxNewtonSteps &&
                         sol.max_violation <= detail::kFeasTol &&
                         sol.kkt_residual <= detail::kStatTol;
  sol.status = converged ? SolveStatus::Optimal : SolveStatus::MaxIterations;
  return sol;
}

// Max of the stationarity norm, the complementary-slackness products, and the
// primal violations of a reported solution.
inline double kkt_residual(const SubproblemInput& in, const SubproblemSolution& sol) {
  in.validate();
  detail::SubproblemForm form(in);
  if (form.dim() == 0) return 0.0;
  const Eigen::VectorXd z = form.pack(sol.precoder, sol.x);
  const auto& cons = form.constraints();
  const int m = static_cast<int>(cons.size());

  double viol = 0.0, comp = 0.0;
  Eigen::VectorXd lagr = form.objective().grad(z);
  for (int i = 0; i < m; ++i) {
    const double g = cons[i].value(z);
    viol = std::max(viol, g);
    const double lambda = (sol.duals.size() == m) ? sol.duals(i) : 0.0;
    lagr += lambda * cons[i].grad(z);
    comp = std::max(comp, std::abs(lambda * g));
  }
  return std::max({lagr.lpNorm<Eigen::Infinity>(), comp, std::max(viol, 0.0)});
}

}  // namespace rsma
