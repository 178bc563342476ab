#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "rsma/solver.hpp"
#include "test_oracles.hpp"

using namespace rsma;

namespace {

UserChannels random_channels(int n, RandomStream& rng) {
  UserChannels h;
  for (int u = 0; u < kNumUsers; ++u) {
    h[u].resize(n);
    for (int i = 0; i < n; ++i) h[u](i) = rng.next_cgauss();
  }
  return h;
}

Precoder random_precoder(int n, double power, RandomStream& rng) {
  Precoder p(n, 3);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < n; ++i) p(i, c) = rng.next_cgauss();
  return Precoder(std::sqrt(power / p.squaredNorm()) * p);
}

// An AO-realistic instance: equalizers and weights from the MMSE state of a
// random reference precoder.
SubproblemInput random_instance(int n, RandomStream& rng, double power = 0.0) {
  SubproblemInput in;
  in.channels = random_channels(n, rng);
  in.power_budget = power > 0.0 ? power : 1.0 + 20.0 * rng.next_uniform();
  in.sigma2 = 0.3 + rng.next_uniform();
  const Precoder ref = random_precoder(n, in.power_budget, rng);
  const WmmseState st = wmmse_state(in.channels, ref, in.sigma2);
  in.equalizers = st.equalizers;
  in.weights = st.weights;
  in.initial_precoder = ref;
  return in;
}

}  // namespace

TEST_CASE("solve_subproblem agrees with the brute-force oracle on N=1") {
  RandomStream rng = RandomStream::seeded(41).substream(0);
  for (int trial = 0; trial < 10; ++trial) {
    const SubproblemInput in = random_instance(1, rng);
    const SubproblemSolution sol = solve_subproblem(in);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.max_violation <= 1e-7);

    const auto oracle_result = oracle::brute_force_subproblem(in, rng.substream(trial));
    CHECK(sol.objective == Catch::Approx(oracle_result.objective).margin(1e-3));
  }
}

TEST_CASE("tiny power budget collapses the precoder onto the x bound") {
  // Equalizers and weights from the MMSE state at P = 0, where the
  // common-rate constraint pins x at zero exactly.
  RandomStream rng = RandomStream::seeded(42).substream(0);
  const UserChannels h = random_channels(2, rng);
  const WmmseState st = wmmse_state(h, Precoder::Zero(2, 3), 1.0);
  SubproblemInput in;
  in.channels = h;
  in.equalizers = st.equalizers;
  in.weights = st.weights;
  in.power_budget = 1e-10;
  in.sigma2 = 1.0;
  const SubproblemSolution sol = solve_subproblem(in);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.precoder.squaredNorm() <= in.power_budget * (1.0 + 1e-9));
  CHECK(sol.x[0] == 0.0);
  CHECK(sol.x[1] == 0.0);
}

TEST_CASE("unreachable rate floors are reported as infeasible") {
  RandomStream rng = RandomStream::seeded(43).substream(0);
  SubproblemInput in = random_instance(2, rng, 4.0);
  double h_max = 0.0;
  for (int u = 0; u < kNumUsers; ++u) h_max = std::max(h_max, in.channels[u].squaredNorm());
  const double unreachable = 10.0 * std::log2(1.0 + in.power_budget * h_max / in.sigma2);
  in.rate_floor = {unreachable, unreachable};
  const SubproblemSolution sol = solve_subproblem(in);
  CHECK(sol.status == SolveStatus::Infeasible);
  CHECK(sol.max_violation > 1e-6);
}

TEST_CASE("kkt_residual certifies optimal solutions and flags perturbations") {
  RandomStream rng = RandomStream::seeded(44).substream(0);
  for (int trial = 0; trial < 5; ++trial) {
    const SubproblemInput in = random_instance(3, rng);
    const SubproblemSolution sol = solve_subproblem(in);
    REQUIRE(sol.status == SolveStatus::Optimal);
    const double base = kkt_residual(in, sol);
    CHECK(base <= 1e-6);
    CHECK(sol.kkt_residual <= 1e-6);

    SubproblemSolution bumped = sol;
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 3; ++i)
        bumped.precoder(i, c) += 1e-2 * rng.next_cgauss();
    CHECK(kkt_residual(in, bumped) > base);
  }
}

TEST_CASE("zero channels make the zero precoder optimal") {
  SubproblemInput in;
  in.channels[0] = Eigen::VectorXcd::Zero(2);
  in.channels[1] = Eigen::VectorXcd::Zero(2);
  in.equalizers = {};  // all zero
  in.weights.common = {1.0, 1.0};
  in.weights.priv = {1.0, 1.0};
  in.power_budget = 5.0;
  in.sigma2 = 1.0;
  const SubproblemSolution sol = solve_subproblem(in);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.precoder.norm() <= 1e-6);
  CHECK(kkt_residual(in, sol) <= 1e-6);
}

TEST_CASE("returned objective is never beaten by random feasible candidates") {
  RandomStream rng = RandomStream::seeded(45).substream(0);
  for (int trial = 0; trial < 5; ++trial) {
    const SubproblemInput in = random_instance(2, rng);
    const SubproblemSolution sol = solve_subproblem(in);
    REQUIRE(sol.status == SolveStatus::Optimal);
    int tested = 0;
    for (int k = 0; k < 2000 && tested < 100; ++k) {
      // Random precoder in the ball; x backed off its bounds so the
      // candidate is feasible whenever the common-rate margin allows it.
      const Precoder cand = random_precoder(2, in.power_budget * rng.next_uniform(), rng);
      auto zeta = [&](int u, bool common) {
        double t = in.sigma2;
        for (int c = common ? 0 : 1; c < 3; ++c) t += std::norm(in.channels[u].dot(cand.col(c)));
        const Complex f = common ? in.equalizers.common[u] : in.equalizers.priv[u];
        const double mu = common ? in.weights.common[u] : in.weights.priv[u];
        const double eps =
            std::norm(f) * t - 2.0 * (f * in.channels[u].dot(cand.col(common ? 0 : u + 1))).real() +
            1.0;
        return mu * eps - std::log2(mu);
      };
      std::array<double, 2> x{};
      double ub_sum = 0.0;
      for (int u = 0; u < 2; ++u) {
        x[u] = std::min(0.0, 1.0 - in.rate_floor[u] - zeta(u, false));
        ub_sum += x[u];
      }
      const double need = std::max(zeta(0, true), zeta(1, true)) - 1.0;
      const double margin = ub_sum - need;
      if (margin <= 0.0) continue;
      for (int u = 0; u < 2; ++u) x[u] -= 0.25 * margin * rng.next_uniform();
      const auto eval = oracle::eval_subproblem(in, cand, x);
      if (eval.worst_violation > 0.0) continue;
      ++tested;
      CHECK(sol.objective <= eval.objective + 1e-6);
    }
    CHECK(tested >= 20);  // the sampler must actually find feasible points
  }
}

TEST_CASE("solve_subproblem is bitwise deterministic") {
  RandomStream rng = RandomStream::seeded(46).substream(0);
  const SubproblemInput in = random_instance(4, rng);
  const SubproblemSolution a = solve_subproblem(in);
  const SubproblemSolution b = solve_subproblem(in);
  REQUIRE(a.status == b.status);
  CHECK(std::memcmp(a.precoder.data(), b.precoder.data(),
                    sizeof(Complex) * a.precoder.size()) == 0);
  CHECK(std::memcmp(a.x.data(), b.x.data(), sizeof a.x) == 0);
  CHECK(a.objective == b.objective);
}

TEST_CASE("scheme masks pin columns and x entries") {
  RandomStream rng = RandomStream::seeded(47).substream(0);

  SECTION("no common stream (SDMA shape)") {
    SubproblemInput in = random_instance(2, rng, 8.0);
    in.column_active = {false, true, true};
    in.x_fixed_zero = {true, true};
    const SubproblemSolution sol = solve_subproblem(in);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.precoder.col(0).norm() == 0.0);
    CHECK(sol.x[0] == 0.0);
    CHECK(sol.x[1] == 0.0);
    CHECK(sol.precoder.squaredNorm() <= in.power_budget * (1.0 + 1e-9));
  }

  SECTION("one private column pinned (NOMA shape)") {
    SubproblemInput in = random_instance(2, rng, 8.0);
    in.column_active = {true, true, false};
    in.x_fixed_zero = {true, false};  // only user 2 takes a common share
    const SubproblemSolution sol = solve_subproblem(in);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.precoder.col(2).norm() == 0.0);
    CHECK(sol.x[0] == 0.0);
    CHECK(sol.x[1] <= 0.0);
  }

  SECTION("missing common stream with free x is rejected") {
    SubproblemInput in = random_instance(2, rng, 8.0);
    in.column_active = {false, true, true};
    in.x_fixed_zero = {false, false};
    CHECK_THROWS_AS(solve_subproblem(in), std::invalid_argument);
  }

  SECTION("floor on a user with no stream at all is infeasible") {
    SubproblemInput in = random_instance(2, rng, 8.0);
    in.column_active = {false, true, false};
    in.x_fixed_zero = {true, true};
    in.rate_floor = {0.0, 0.5};
    const SubproblemSolution sol = solve_subproblem(in);
    CHECK(sol.status == SolveStatus::Infeasible);
  }
}

TEST_CASE("input validation rejects bad weights and budgets") {
  RandomStream rng = RandomStream::seeded(48).substream(0);
  SubproblemInput good = random_instance(2, rng);
  CHECK_NOTHROW(good.validate());

  SubproblemInput in = good;
  in.power_budget = 0.0;
  CHECK_THROWS_AS(in.validate(), std::invalid_argument);
  in = good;
  in.weights.priv[0] = 0.0;
  CHECK_THROWS_AS(in.validate(), std::invalid_argument);
  in = good;
  in.rate_floor[1] = -0.1;
  CHECK_THROWS_AS(in.validate(), std::invalid_argument);
}
