#include <cmath>

#include <gtest/gtest.h>

#include "symcool/budget.hpp"

using namespace symcool;

TEST(Budget, QubitPairNumbers) {
    const BudgetReport r = compute_budget(BudgetInput{});
    // 1e3 * 47^2 / (4 * 5200^2)
    EXPECT_NEAR(r.qubit_scatter, 1e3 * 47.0 * 47.0 / (4.0 * 5200.0 * 5200.0), 1e-12);
    EXPECT_NEAR(r.qubit_scatter, 0.020, 0.001);
    EXPECT_NEAR(r.ac_stark_shift_hz, 1e3 / (2.0 * M_PI) * 47.0 / (4.0 * 5200.0), 1e-12);
    EXPECT_NEAR(r.ac_stark_shift_hz, 0.30, 0.07);
    EXPECT_NEAR(r.refrigerator_scatter, 12.0 * 2.0 * M_PI * 47e6 / 2.0, 1e-3);
    EXPECT_NEAR(r.cooling_margin, r.refrigerator_scatter / 1e3, 1e-6);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Budget, DecouplingLimit) {
    BudgetInput in;
    in.isotope_shift = 2.0 * M_PI * 1e15;
    const auto r = compute_budget(in);
    EXPECT_LT(r.qubit_scatter, 1e-12);
    EXPECT_LT(r.ac_stark_shift_hz, 1e-5);
}

TEST(Budget, LinearInHeatingRate) {
    BudgetInput in;
    const auto a = compute_budget(in);
    in.heating_rate *= 2.0;
    const auto b = compute_budget(in);
    EXPECT_NEAR(b.qubit_scatter / a.qubit_scatter, 2.0, 1e-14);
    EXPECT_NEAR(b.ac_stark_shift_hz / a.ac_stark_shift_hz, 2.0, 1e-14);
}

TEST(Budget, SmallShiftWarns) {
    BudgetInput in;
    in.isotope_shift = 2.0 * M_PI * 200e6;
    EXPECT_FALSE(compute_budget(in).warnings.empty());
}

TEST(Budget, InvalidInputs) {
    BudgetInput in;
    in.gamma = 0.0;
    EXPECT_THROW(compute_budget(in), ArgumentError);
    in = BudgetInput{};
    in.heating_rate = INFINITY;
    EXPECT_THROW(compute_budget(in), ArgumentError);
    in = BudgetInput{};
    in.isotope_shift = NAN;
    EXPECT_THROW(compute_budget(in), ArgumentError);
}

TEST(Budget, SweepIsotopeShift) {
    const auto rows = sweep_budget(BudgetInput{}, "isotope_shift", {2.0 * M_PI * 680e6, 2.0 * M_PI * 5.2e9});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(rows[0].qubit_scatter / rows[1].qubit_scatter, std::pow(5.2e9 / 6.8e8, 2), 1e-9);
    EXPECT_NEAR(rows[0].qubit_scatter / rows[1].qubit_scatter, 58.5, 0.1);
}

TEST(Budget, SweepEdgeCases) {
    EXPECT_TRUE(sweep_budget(BudgetInput{}, "gamma", {}).empty());
    BudgetInput in;
    in.refrigerator_saturation = 3.0;
    const auto one = sweep_budget(BudgetInput{}, "refrigerator_saturation", {3.0});
    ASSERT_EQ(one.size(), 1u);
    const auto direct = compute_budget(in);
    EXPECT_EQ(one[0].refrigerator_scatter, direct.refrigerator_scatter);
    EXPECT_EQ(one[0].qubit_scatter, direct.qubit_scatter);
    EXPECT_THROW(sweep_budget(BudgetInput{}, "bogus", {1.0}), ArgumentError);
}
