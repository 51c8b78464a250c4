#include <cmath>
#include <vector>

#include <doctest.h>

#include "randsum/bounds.hpp"
#include "randsum/errors.hpp"
#include "randsum/lower.hpp"
#include "randsum/mc.hpp"
#include "randsum/quadrature.hpp"
#include "randsum/special.hpp"

using namespace randsum;

TEST_CASE("two-point construction parameters") {
    const TwoPointConstruction c = TwoPointConstruction::for_level(3.0);
    CHECK(c.k == 9);
    CHECK(c.alpha == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(c.mean == doctest::Approx(25.0 / 9.0).epsilon(1e-15));
    CHECK(c.mean >= 25.0 / 9.0 - 1e-12);
    CHECK(c.law.mean() == doctest::Approx(c.mean).epsilon(1e-15));
    CHECK_THROWS_AS(TwoPointConstruction::for_level(2.5), DomainError);
}

TEST_CASE("two-point exact tail at x = 3 against quadrature") {
    const TwoPointTail t = exact_two_point_tail(3.0);
    // heavy branch: alpha * Psi(x sqrt(A alpha)) = (1/9) Psi(5/3), with Psi by
    // density quadrature rather than the erfc implementation
    const auto psi_heavy =
        integrate([](double y) { return normal_pdf(y); }, 5.0 / 3.0, 45.0, 1e-12);
    CHECK(t.heavy_term == doctest::Approx(psi_heavy.value / 9.0).epsilon(1e-9));
    CHECK(t.heavy_term == doctest::Approx(0.00531).epsilon(2e-3));
    const auto psi_light =
        integrate([](double y) { return normal_pdf(y); }, 3.0 * std::sqrt(25.0 / 18.0), 45.0, 1e-12);
    CHECK(t.exact == doctest::Approx(psi_heavy.value / 9.0 + psi_light.value * 8.0 / 9.0)
                         .epsilon(1e-9));
    CHECK(t.exact >= t.heavy_term);
    // the comparison floor Psi(3 sqrt(3/8)) / x^2, again by quadrature
    const auto psi_floor = integrate([](double y) { return normal_pdf(y); },
                                     3.0 * std::sqrt(3.0 / 8.0), 45.0, 1e-12);
    CHECK(t.floor_value == doctest::Approx(psi_floor.value / 9.0).epsilon(1e-9));
}

TEST_CASE("x^2-scaled two-point tail stays above the fixed floor on [3, 50]") {
    const double floor_const = normal_upper_tail(3.0 * std::sqrt(3.0 / 8.0));
    for (double x = 3.0; x <= 50.0 + 1e-9; x += 0.5) {
        const TwoPointTail t = exact_two_point_tail(x);
        CHECK(x * x * t.exact >= floor_const);
        CHECK(t.exact >= t.heavy_term);
    }
}

TEST_CASE("two-point exact tail sits below the mixture upper bound") {
    const TailFunction normal = TailFunction::standard_normal();
    const CumulantModel model = CumulantModel::normal();
    for (double x : {3.0, 4.0, 6.0, 10.0}) {
        const TwoPointConstruction c = TwoPointConstruction::for_level(x);
        const double bound = random_sum_bound(normal, model, c.law, 1.0, x);
        CHECK(exact_two_point_tail(x).exact <= bound);
    }
}

TEST_CASE("two-point MC companion lands in the exact value's 99.9% band") {
    const TwoPointConstruction c = TwoPointConstruction::for_level(3.0);
    CompoundSpec spec{SummandLaw::standard_normal(), c.law};
    SimulateOptions options;
    options.ci_level = 0.999;
    options.threads = 2;
    const EmpiricalTail mc = simulate_tail(spec, std::vector<double>{3.0}, 400000, 31, options);
    const double exact = exact_two_point_tail(3.0).exact;
    CHECK(mc.ci_low[0] <= exact);
    CHECK(mc.ci_high[0] >= exact);
}

TEST_CASE("poisson overlay: same exponents on both sides") {
    const SumExponents exps = sum_exponents(2.0, 0.0);
    std::vector<double> grid;
    for (double x = 2.0; x <= 40.0; x *= 1.4) grid.push_back(x);
    const auto rows = poisson_lower_overlay(exps, 2.0, 1.0, 0.5, 1.0, grid);
    REQUIRE(rows.size() == grid.size());
    for (const auto& row : rows) {
        CHECK(row.lower <= row.upper);
        // identical functional form: the ratio of log-envelopes is c_lower/c_upper
        CHECK(std::log(row.lower) / std::log(row.upper) == doctest::Approx(4.0).epsilon(1e-10));
    }
    // substitution at x = e: log x = 1 so the log factor drops out
    const double e = std::exp(1.0);
    const auto at_e = poisson_lower_overlay(exps, 1.0, 1.0, 1.0, 1.0, std::vector<double>{e});
    CHECK(at_e[0].upper ==
          doctest::Approx(std::exp(-std::pow(e, 1.0))).epsilon(1e-12));
}

TEST_CASE("geometric lower-tail MC end to end" * doctest::timeout(300)) {
    const OrliczTailSpec spec(2.0, 0.0, 1.0);
    // infeasible request: the bound at x = 30 is astronomically small
    {
        GeometricLowerOptions options;
        std::vector<double> grid{2.0, 30.0};
        CHECK_THROWS_AS(geometric_lower_tail_mc(spec, 4.0, grid, 10000, 5, options), DomainError);
    }
    // m <= 1 rejected
    CHECK_THROWS_AS(
        geometric_lower_tail_mc(OrliczTailSpec(1.0, 0.0), 4.0, std::vector<double>{2.0}, 10000, 5),
        DomainError);

    GeometricLowerOptions options;
    options.threads = 2;
    std::vector<double> grid{2.0, 2.5, 3.0};
    const EmpiricalTail tail = geometric_lower_tail_mc(spec, 4.0, grid, 200000, 5, options);
    // events observed at every accepted x
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(tail.hits[i] > 0);
        CHECK(tail.ci_low[i] > 0.0);
    }
    // sandwich: the empirical tail never exceeds the certified upper bound
    const SummandLaw law = SummandLaw::orlicz(spec);
    const CumulantModel model = law.make_cumulant();
    const IndexLaw geo = IndexLaw::geometric(4.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double bound = random_sum_bound(law.tail(), model, geo, law.sd(), grid[i]);
        CHECK(tail.ci_low[i] <= bound);
    }
}

TEST_CASE("geometric lower-tail MC has the envelope's decay exponent" * doctest::timeout(300)) {
    // power 2 summand shape gives a mixture exponent 2M/(M+2) = 1; the fitted
    // log-log slope of -log(tail) must land in the +-0.2 band around it
    const OrliczTailSpec spec(2.0, 0.0, 1.0);
    GeometricLowerOptions options;
    options.threads = 2;
    std::vector<double> grid;
    for (double x = 2.0; x <= 5.0 + 1e-9; x += 0.5) grid.push_back(x);
    const EmpiricalTail tail = geometric_lower_tail_mc(spec, 4.0, grid, 400000, 13, options);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (tail.hits[i] < 100) continue;
        lx.push_back(std::log(grid[i]));
        ly.push_back(std::log(-std::log(tail.estimate[i])));
    }
    REQUIRE(lx.size() >= 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double n = static_cast<double>(lx.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= 0.8);
    CHECK(slope <= 1.2);
}
