#include <chrono>
#include <random>
#include <sstream>

#include "doctest.h"
#include "random_programs.hpp"
#include "volte/bip.hpp"

using namespace volte::bip;
using namespace std::chrono_literals;

TEST_CASE("LP: maximize x subject to x <= 1") {
    BinaryProgram p(1);
    p.objective = {1.0};
    p.add_le({1.0}, 1.0);
    const auto lp = solve_lp_relaxation(p);
    REQUIRE(lp.status == LpStatus::optimal);
    CHECK(lp.values[0] == doctest::Approx(1.0));
    CHECK(lp.objective == doctest::Approx(1.0));
}

TEST_CASE("LP: fractional knapsack vertex") {
    // max 3a + 2b, 2a + 2b <= 3
    BinaryProgram p(2);
    p.objective = {3.0, 2.0};
    p.add_le({2.0, 2.0}, 3.0);
    const auto lp = solve_lp_relaxation(p);
    REQUIRE(lp.status == LpStatus::optimal);
    CHECK(lp.values[0] == doctest::Approx(1.0));
    CHECK(lp.values[1] == doctest::Approx(0.5));
    CHECK(lp.objective == doctest::Approx(4.0));
}

TEST_CASE("LP: infeasible cover") {
    // 18 bits on each of 3 PRBs can never reach 300
    BinaryProgram p(3);
    p.add_ge(300.0).coeffs = {18.0, 18.0, 18.0};
    CHECK(solve_lp_relaxation(p).status == LpStatus::infeasible);
    CHECK(solve_branch_and_bound(p, 10s).status == SolveStatus::infeasible);
    CHECK(solve_exhaustive(p).status == SolveStatus::infeasible);
}

TEST_CASE("LP honours fixings") {
    BinaryProgram p(2);
    p.objective = {5.0, 1.0};
    p.add_le({1.0, 1.0}, 1.0);
    const auto lp = solve_lp_relaxation(p, Fixings{0, -1});
    REQUIRE(lp.status == LpStatus::optimal);
    CHECK(lp.values[0] == 0.0);
    CHECK(lp.values[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(solve_lp_relaxation(p, Fixings{0}), std::invalid_argument);
}

TEST_CASE("exhaustive: trivial programs") {
    BinaryProgram one(1);
    one.objective = {1.0};
    const auto a = solve_exhaustive(one);
    REQUIRE(a.status == SolveStatus::optimal);
    CHECK(a.assignment == std::vector<int>{1});

    BinaryProgram pick(2);
    pick.objective = {3.0, 5.0};
    pick.add_eq(1.0).coeffs = {1.0, 1.0};
    const auto b = solve_exhaustive(pick);
    REQUIRE(b.status == SolveStatus::optimal);
    CHECK(b.assignment == std::vector<int>{0, 1});
    CHECK(b.objective_value == 5.0);
}

TEST_CASE("exhaustive rejects oversized programs") {
    BinaryProgram p(26);
    CHECK_THROWS_AS(solve_exhaustive(p), std::invalid_argument);
}

TEST_CASE("malformed programs are rejected") {
    BinaryProgram p(2);
    p.objective = {1.0};
    CHECK_THROWS_AS(solve_branch_and_bound(p, 1s), std::invalid_argument);
    BinaryProgram q(2);
    q.add_ge(1.0).coeffs = {1.0};
    CHECK_THROWS_AS(solve_lp_relaxation(q), std::invalid_argument);
}

TEST_CASE("integral relaxation needs no branching") {
    BinaryProgram p(3);
    p.objective = {2.0, 3.0, 1.0};
    p.add_eq(1.0).coeffs = {1.0, 1.0, 0.0};
    const auto out = solve_branch_and_bound(p, 10s);
    REQUIRE(out.status == SolveStatus::optimal);
    CHECK(out.branches == 0);
    CHECK(out.assignment == std::vector<int>{0, 1, 1});
    CHECK(out.objective_value == 4.0);
    CHECK(out.relaxation_bound == doctest::Approx(4.0));
}

TEST_CASE("relaxation dominates the 0/1 optimum") {
    std::mt19937_64 rng(11);
    int feasible = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = volte::testing::random_program(rng, 12);
        const auto exact = solve_exhaustive(p);
        const auto lp = solve_lp_relaxation(p);
        if (exact.status == SolveStatus::optimal) {
            ++feasible;
            REQUIRE(lp.status == LpStatus::optimal);
            CHECK(lp.objective >= exact.objective_value - 1e-6);
        }
    }
    CHECK(feasible > 10);
}

TEST_CASE("branch-and-bound matches enumeration") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 80; ++trial) {
        const auto p = volte::testing::random_program(rng, 16);
        const auto exact = solve_exhaustive(p);
        const auto bb = solve_branch_and_bound(p, 30s);
        REQUIRE(bb.status != SolveStatus::timeout);
        CHECK(bb.status == exact.status);
        if (exact.status == SolveStatus::optimal) {
            CHECK(bb.objective_value == exact.objective_value);
            CHECK(p.satisfies(bb.assignment));
            CHECK(p.satisfies(exact.assignment));
            CHECK(bb.objective_value <= bb.relaxation_bound + 1e-6);
        }
    }
}

TEST_CASE("timeout is reported, not passed off as optimal") {
    // the budget is checked before every node, the root included
    BinaryProgram p(2);
    p.objective = {3.0, 2.0};
    p.add_le({2.0, 2.0}, 3.0);
    const auto out = solve_branch_and_bound(p, 0s);
    CHECK(out.status == SolveStatus::timeout);
}

TEST_CASE("node budget ends the search as a timeout") {
    std::mt19937_64 rng(77);
    int cut_short = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const auto p = volte::testing::random_program(rng, 16);
        const auto full = solve_branch_and_bound(p, 30s);
        const auto capped = solve_branch_and_bound(p, SolveLimits(30s, 1));
        CHECK(capped.nodes <= 1);
        if (full.nodes > 1) {
            CHECK(capped.status == SolveStatus::timeout);
            ++cut_short;
        }
        if (capped.has_assignment()) {
            CHECK(p.satisfies(capped.assignment));
            CHECK(capped.objective_value <= full.objective_value);
        }
    }
    CHECK(cut_short > 0);
}

TEST_CASE("a feasible hint seeds the incumbent; an infeasible one is ignored") {
    BinaryProgram p(3);
    p.objective = {4.0, 3.0, 2.0};
    p.add_le({2.0, 2.0, 2.0}, 3.0);
    const std::vector<int> feasible{0, 0, 1};
    const auto seeded = solve_branch_and_bound(p, SolveLimits(30s, 1), feasible);
    REQUIRE(seeded.has_assignment());
    CHECK(p.satisfies(seeded.assignment));
    CHECK(seeded.objective_value >= 2.0);

    const std::vector<int> infeasible{1, 1, 0};
    const auto solved = solve_branch_and_bound(p, 30s, infeasible);
    REQUIRE(solved.status == SolveStatus::optimal);
    CHECK(solved.assignment == std::vector<int>{1, 0, 0});
    CHECK(solved.objective_value == 4.0);

    const std::vector<int> wrong_size{1};
    CHECK(solve_branch_and_bound(p, 30s, wrong_size).objective_value == 4.0);
}

TEST_CASE("reduced costs bound the relaxation after flipping a variable") {
    // The property reduced-cost fixing relies on: moving a nonbasic variable to its
    // other bound costs at least |d_j|.
    std::mt19937_64 rng(404);
    int checked = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const auto p = volte::testing::random_program(rng, 12);
        const auto lp = solve_lp_relaxation(p);
        if (lp.status != LpStatus::optimal) {
            continue;
        }
        REQUIRE(lp.reduced_costs.size() == static_cast<std::size_t>(p.num_vars));
        for (int j = 0; j < p.num_vars; ++j) {
            const double d = lp.reduced_costs[j];
            if (d == 0.0) {
                continue;
            }
            Fixings fix(static_cast<std::size_t>(p.num_vars), -1);
            fix[j] = lp.values[j] > 0.5 ? 0 : 1;
            const auto flipped = solve_lp_relaxation(p, fix);
            if (flipped.status == LpStatus::optimal) {
                CHECK(flipped.objective <= lp.objective - std::abs(d) + 1e-6);
            }
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("program dump") {
    BinaryProgram p(2);
    p.objective = {1.0, 2.0};
    p.add_eq(1.0).coeffs = {1.0, 1.0};
    p.add_ge(0.5).coeffs = {0.0, 3.0};
    std::ostringstream out;
    write_program_dump(out, p);
    CHECK(out.str() == "max 1 2\neq 1 1 1\nge 0 3 0.5\n");
}
