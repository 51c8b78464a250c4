#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "randsum/bounds.hpp"
#include "randsum/errors.hpp"
#include "randsum/rng.hpp"
#include "randsum/special.hpp"

using namespace randsum;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double brute_truncation(const TailFunction& tail, double x) {
    double best = 1e308;
    for (int i = 0; i < 10000; ++i) {
        const double z = 1e-6 * std::pow(1e12, i / 9999.0);
        const double v = std::exp(-x * x / (8.0 * z * z)) + tail.second_moment_tail(z);
        best = std::min(best, v);
    }
    return std::min(1.0, 4.0 * best);
}
} // namespace

TEST_CASE("cumulant models: closed forms and the small-lambda law") {
    const CumulantModel normal = CumulantModel::normal();
    CHECK(normal.log_mgf(0.0) == 0.0);
    CHECK(normal.log_mgf(1.7) == doctest::Approx(1.445).epsilon(1e-14));
    CHECK(normal.small_lambda_ok());

    const CumulantModel pm1 = CumulantModel::two_point();
    CHECK(pm1.log_mgf(2.0) == doctest::Approx(std::log(std::cosh(2.0))).epsilon(1e-13));
    CHECK(pm1.small_lambda_ok());
    CHECK(pm1.variance() == 1.0);

    const CumulantModel sampled = CumulantModel::from_samples({3.0, 3.0, 3.0});
    CHECK(sampled.log_mgf(0.5) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("cumulant models are convex and even in lambda") {
    const CumulantModel models[] = {CumulantModel::normal(), CumulantModel::two_point(),
                                    CumulantModel::from_tail(TailFunction::standard_normal())};
    for (const auto& model : models) {
        CHECK(model.log_mgf(-1.5) == model.log_mgf(1.5));
        for (double a = 0.25; a < 8.0; a *= 2.0) {
            const double b = a + 1.0;
            CHECK(model.log_mgf(0.5 * (a + b)) <=
                  0.5 * (model.log_mgf(a) + model.log_mgf(b)) + 1e-9);
            CHECK(model.log_mgf(a) >= 0.0);
        }
    }
}

TEST_CASE("numeric cumulant from the normal tail matches the closed form") {
    const CumulantModel numeric = CumulantModel::from_tail(TailFunction::standard_normal());
    CHECK(numeric.variance() == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(numeric.small_lambda_ok());
    for (double lam : {0.25, 1.0, 3.0, 8.0})
        CHECK(numeric.log_mgf(lam) == doctest::Approx(lam * lam / 2.0).epsilon(1e-6));
    CHECK(numeric.cramer_radius() > 10.0);
}

TEST_CASE("cramer condition detection by tail weight") {
    // heavier than exponential: no usable exponential moments
    const CumulantModel heavy = CumulantModel::from_tail(TailFunction::orlicz({0.5, 0.0}));
    CHECK(heavy.cramer_radius() < 0.05);
    CHECK(rate_function(heavy, 5.0) <= 0.3);
    CHECK(std::exp(-rate_function(heavy, 5.0)) > 0.7); // rate branch effectively dead
    // exactly exponential with rate 1: radius just below 1
    const CumulantModel edge = CumulantModel::from_tail(TailFunction::orlicz({1.0, 0.0}));
    CHECK(edge.cramer_radius() > 0.5);
    CHECK(edge.cramer_radius() < 1.0);
    CHECK(edge.log_mgf(2.0) == kInf);
    CHECK(rate_function(edge, 4.0) > 0.5); // the usable branch survives a radius < 1
    // a tiny but positive radius still yields a usable (if weak) rate branch
    const CumulantModel narrow = CumulantModel::from_tail(TailFunction::orlicz({1.0, 0.0, 0.1}));
    CHECK(narrow.cramer_radius() < 0.11);
    CHECK(narrow.cramer_radius() > 0.01);
    const double r = rate_function(narrow, 60.0);
    CHECK(r > 1.0);
    CHECK(r < 0.11 * 60.0);
}

TEST_CASE("numeric cumulant from a step tail matches the atom closed form") {
    // atoms of mass 1/2 at |xi| = 1 and |xi| = 2: E exp(lambda xi) is
    // (cosh lambda + cosh 2 lambda) / 2
    const CumulantModel model =
        CumulantModel::from_tail(TailFunction::empirical({1.0, 2.0}, {0.5, 0.0}));
    for (double lam : {0.3, 1.0, 2.0}) {
        const double expected =
            std::log(0.5 * std::cosh(lam) + 0.5 * std::cosh(2.0 * lam));
        CHECK(model.log_mgf(lam) == doctest::Approx(expected).epsilon(1e-6));
    }
    CHECK(model.variance() == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("sum cumulant: gaussian scale invariance and two-point brute force") {
    const CumulantModel normal = CumulantModel::normal();
    CHECK(sum_cumulant(normal, 0.0) == 0.0);
    for (double lam : {0.3, 1.0, 2.5, 7.0})
        CHECK(sum_cumulant(normal, lam) == doctest::Approx(lam * lam / 2.0).epsilon(1e-12));

    const CumulantModel pm1 = CumulantModel::two_point();
    const double lam = 0.1;
    double brute = 0.0;
    for (long n = 1; n <= 1000000; ++n) {
        const double v = n * pm1.log_mgf(lam / std::sqrt(static_cast<double>(n)));
        brute = std::max(brute, v);
    }
    CHECK(std::fabs(sum_cumulant(pm1, lam) - brute) < 1e-10);
}

TEST_CASE("rate function: gaussian oracle, duality, monotonicity") {
    const CumulantModel normal = CumulantModel::normal();
    CHECK(rate_function(normal, 0.0) == 0.0);
    for (double x : {0.5, 1.0, 2.0, 3.0, 5.0, 10.0})
        CHECK(rate_function(normal, x) == doctest::Approx(x * x / 2.0).epsilon(1e-8));
    // envelope: the maximizing lambda is the derivative of the rate
    for (double x : {1.0, 2.5, 4.0}) {
        const RatePoint p = rate_function_detail(normal, x);
        const double grad =
            (rate_function(normal, x + 1e-4) - rate_function(normal, x - 1e-4)) / 2e-4;
        CHECK(std::fabs(grad - p.maximizer) < 1e-3);
        CHECK(std::fabs(p.maximizer - x) < 1e-3);
    }
    double prev = -1.0;
    for (double x = 0.0; x <= 6.0; x += 0.5) {
        const double r = rate_function(normal, x);
        CHECK(r >= prev - 1e-12);
        prev = r;
    }
    // numeric model agrees with the closed form to 1e-6 absolute
    const CumulantModel numeric = CumulantModel::from_tail(TailFunction::standard_normal());
    for (double x : {0.5, 1.0, 2.0, 3.0, 5.0})
        CHECK(rate_function(numeric, x) == doctest::Approx(x * x / 2.0).epsilon(2e-6));
    // duality also holds on the tabulated path
    for (double x : {1.0, 3.0}) {
        const RatePoint p = rate_function_detail(numeric, x);
        const double grad =
            (rate_function(numeric, x + 1e-4) - rate_function(numeric, x - 1e-4)) / 2e-4;
        CHECK(std::fabs(grad - p.maximizer) < 1e-3);
    }
}

TEST_CASE("truncation bound: cap, brute-force oracle, monotonicity") {
    const TailFunction normal = TailFunction::standard_normal();
    CHECK(truncation_bound(normal, 0.0) == 1.0);
    for (double x : {3.0, 10.0, 20.0}) {
        const double ours = truncation_bound(normal, x);
        const double brute = brute_truncation(normal, x);
        CHECK(ours <= brute + 1e-6);
        CHECK(ours <= 1.0);
    }
    double prev = 1.0;
    for (double x = 0.0; x <= 30.0; x += 1.0) {
        const double w = truncation_bound(normal, x);
        CHECK(w <= prev + 1e-7);
        prev = w;
    }
    // bounded summands have the two-piece closed form
    const TailFunction pm1 = TailFunction::orlicz(OrliczTailSpec::bounded(1.0));
    for (double x : {1.0, 4.0, 8.0}) {
        const double expected = std::min(1.0, 4.0 * std::min(1.0, std::exp(-x * x / 8.0)));
        CHECK(truncation_bound(pm1, x) == doctest::Approx(expected).epsilon(1e-12));
    }
    // empirical tails run through the generic scan path
    const TailFunction step = TailFunction::empirical({1.0, 2.0, 3.0}, {0.6, 0.2, 0.0});
    const double w_step = truncation_bound(step, 6.0);
    CHECK(w_step <= brute_truncation(step, 6.0) + 1e-6);
}

TEST_CASE("combined bound: branches and values") {
    const TailFunction normal = TailFunction::standard_normal();
    const CumulantModel model = CumulantModel::normal();
    const BranchValue at_zero = uniform_sum_bound(normal, model, 0.0);
    CHECK(at_zero.value == 1.0);
    const BranchValue at_three = uniform_sum_bound(normal, model, 3.0);
    CHECK(at_three.value == doctest::Approx(std::exp(-4.5)).epsilon(1e-7));
    CHECK(at_three.branch == BoundBranch::rate);
    // soundness: the combined value never exceeds any single branch
    for (double x = 0.0; x <= 6.0; x += 0.5) {
        const BranchValue q = uniform_sum_bound(normal, model, x);
        CHECK(q.value <= truncation_bound(normal, x) + 1e-12);
        CHECK(q.value <= std::exp(-rate_function(model, x)) + 1e-12);
        if (x > 0) CHECK(q.value <= std::min(1.0, 1.0 / (x * x)) + 1e-12);
    }
    // bounded +-1 at x = 1: the true tail is 1/2, the bound must respect it
    const TailFunction pm1 = TailFunction::orlicz(OrliczTailSpec::bounded(1.0));
    const CumulantModel pm1_model = CumulantModel::two_point();
    CHECK(uniform_sum_bound(pm1, pm1_model, 1.0).value >= 0.5);
    CHECK(branch_name(BoundBranch::truncation) == "W");
    CHECK(branch_name(BoundBranch::rate) == "chi-star");
    CHECK(branch_name(BoundBranch::chebyshev) == "chebyshev");
}

TEST_CASE("random sum bound: deterministic reduction and long-sum oracle") {
    const TailFunction normal = TailFunction::standard_normal();
    const CumulantModel model = CumulantModel::normal();

    const IndexLaw det = IndexLaw::deterministic(4);
    for (double x : {0.0, 1.0, 2.5}) {
        const double expect = uniform_sum_bound(normal, model, x).value;
        CHECK(random_sum_bound(normal, model, det, 1.0, x) ==
              doctest::Approx(std::min(expect, x > 0 ? 1.0 / (x * x) : 1.0)).epsilon(1e-12));
    }

    const IndexLaw geo = IndexLaw::geometric(4.0);
    const double x = 3.0;
    double brute = 0.0;
    for (std::uint64_t n = 1; n <= 10000; ++n) {
        const double y = x * std::sqrt(4.0 / static_cast<double>(n));
        brute += geo.pmf(n) * uniform_sum_bound(normal, model, y).value;
    }
    brute += geo.tail_mass(10000);
    brute = std::min(brute, std::min(1.0, 1.0 / (x * x)));
    CHECK(std::fabs(random_sum_bound(normal, model, geo, 1.0, x) - brute) < 1e-10);

    CHECK(random_sum_bound(normal, model, geo, 1.0, 0.0) == 1.0);
    CHECK_THROWS_AS(random_sum_bound(normal, model, geo, 0.0, 1.0), DomainError);

    // finitely supported laws stop at their support even when the requested
    // mass target is tighter than their rounding defect
    const IndexLaw uneven = IndexLaw::explicit_probs({0.25, 0.25, 0.25, 0.25 - 2e-13});
    const double b = random_sum_bound(normal, model, uneven, 1.0, 2.0, 1e-15);
    CHECK(b > 0.0);
    CHECK(b <= 1.0);
}

TEST_CASE("random sum bound: truncation mass certification") {
    const TailFunction normal = TailFunction::standard_normal();
    const CumulantModel model = CumulantModel::normal();
    for (double mean : {2.0, 4.0, 16.0}) {
        const IndexLaw law = IndexLaw::geometric(mean);
        for (double x = 0.0; x <= 6.0; x += 0.25) {
            const double coarse = random_sum_bound(normal, model, law, 1.0, x, 1e-12);
            const double fine = random_sum_bound(normal, model, law, 1.0, x, 1e-15);
            CHECK(std::fabs(coarse - fine) < 1e-11);
            CHECK(coarse >= fine - 1e-15); // remainder enters at its worst case
        }
    }
}

TEST_CASE("gaussian oracle chain: the mixture bound dominates the exact tail") {
    const TailFunction normal = TailFunction::standard_normal();
    const CumulantModel model = CumulantModel::normal();
    for (std::uint64_t n : {2ULL, 4ULL, 9ULL}) {
        const IndexLaw det = IndexLaw::deterministic(n);
        for (double x = 0.0; x <= 6.0; x += 0.25) {
            // S is exactly standard normal for a deterministic index
            CHECK(random_sum_bound(normal, model, det, 1.0, x) >= normal_upper_tail(x));
        }
    }
}

TEST_CASE("dominant index: exhaustive oracle, scaling, tie-break") {
    const SumExponents gauss{2.0, 0.0};
    for (double mean : {2.0, 8.0}) {
        const IndexLaw law = IndexLaw::geometric(mean);
        for (double x : {4.0, 16.0, 64.0}) {
            const std::uint64_t fast = dominant_index(law, gauss, x);
            // independent exhaustive scan, no early exit
            double best = -1e308;
            std::uint64_t best_n = 1;
            for (std::uint64_t n = 1; n <= 1000000; ++n) {
                const double y = x * std::sqrt(mean / static_cast<double>(n));
                const double lt = std::log(law.pmf(n)) -
                                  std::pow(y, gauss.power) *
                                      std::pow(std::log(kDefaultLogShift + y), gauss.log_power);
                if (lt > best) {
                    best = lt;
                    best_n = n;
                }
            }
            CHECK(fast == best_n);
        }
    }
    // shifted poisson path exists
    CHECK(dominant_index(IndexLaw::shifted_poisson(4.0), gauss, 8.0) >= 1);
    // asymptotic scaling: N0 grows like x^{2M/(M+2)} = x for gaussian shape
    for (double mean : {2.0, 8.0}) {
        const IndexLaw law = IndexLaw::geometric(mean);
        const double lo = static_cast<double>(dominant_index(law, gauss, 1e3));
        const double hi = static_cast<double>(dominant_index(law, gauss, 1e4));
        CHECK(hi / lo > 10.0 * 0.75);
        CHECK(hi / lo < 10.0 * 1.25);
    }
    CHECK_THROWS_AS(dominant_index(IndexLaw::deterministic(4), gauss, 8.0), DomainError);
    CHECK_THROWS_AS(dominant_index(IndexLaw::geometric(4.0), gauss, 1.0), DomainError);
    // documented tie-break: equal values keep the smaller index
    const std::uint64_t tie = detail::scan_argmax([](std::uint64_t) { return 1.0; }, 1, 1000);
    CHECK(tie == 1);
}

TEST_CASE("closed-form envelopes") {
    const SumExponents gauss{2.0, 0.0};
    CHECK(closed_form_geometric_bound(gauss, 0.5, 1.0, 2.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    // with power 2 the x-exponent is exactly 1
    const double b2 = closed_form_geometric_bound(gauss, 0.5, 1.0, 2.0);
    const double b4 = closed_form_geometric_bound(gauss, 0.5, 1.0, 4.0);
    CHECK(std::log(b4) / std::log(b2) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK(closed_form_poisson_bound(gauss, 1.0, 1.0, 2.0) ==
          doctest::Approx(std::exp(-2.0 * std::sqrt(std::log(2.0)))).epsilon(1e-13));
    // bounded summands: x-power 1 and log-power 1/2
    const SumExponents bounded = sum_exponents(kInf, 0.0);
    const double x = 7.0;
    CHECK(closed_form_poisson_bound(bounded, 1.0, 1.0, x) ==
          doctest::Approx(std::exp(-x * std::sqrt(std::log(x)))).epsilon(1e-12));
    // the extra log factor makes the poisson envelope smaller past x = e
    for (double xx = 2.8; xx < 40.0; xx *= 1.6)
        CHECK(closed_form_poisson_bound(gauss, 1.0, 1.0, xx) <
              closed_form_geometric_bound(gauss, 1.0, 1.0, xx));
    CHECK_THROWS_AS(closed_form_geometric_bound(gauss, 1.0, 1.0, 1.5), DomainError);
}

TEST_CASE("mixture bound stays a probability across index means") {
    const TailFunction normal = TailFunction::standard_normal();
    const CumulantModel model = CumulantModel::normal();
    for (double x : {1.0, 3.0, 5.0}) {
        double sup = 0.0;
        for (double mean : {2.0, 4.0, 8.0, 16.0}) {
            const double b = random_sum_bound(normal, model, IndexLaw::geometric(mean), 1.0, x);
            CHECK(b > 0.0);
            CHECK(b <= 1.0);
            sup = std::max(sup, b);
        }
        CHECK(sup <= std::min(1.0, 1.0 / (x * x)) + 1e-12);
    }
}

TEST_CASE("mixture bound decays at least at the closed-form exponent") {
    const TailFunction normal = TailFunction::standard_normal();
    const CumulantModel model = CumulantModel::normal();
    const IndexLaw geo = IndexLaw::geometric(4.0);
    std::vector<double> xs, ys;
    for (double x = 2.0; x <= 10.0; x += 0.5) {
        const double b = random_sum_bound(normal, model, geo, 1.0, x);
        xs.push_back(std::log(x));
        ys.push_back(std::log(-std::log(b)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double n = static_cast<double>(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= 2.0 * 2.0 / (2.0 + 2.0) - 0.1); // 2M/(M+2) - delta
}

TEST_CASE("stopped-sum exponents") {
    const StoppedSumExponents e = stopped_sum_exponents(2.0, 0.0, 2.0, 0.0);
    CHECK(e.q == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
    CHECK(e.w == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        const double a = 0.1 + 10.0 * rng.uniform01();
        const double m = 0.1 + 10.0 * rng.uniform01();
        const StoppedSumExponents s = stopped_sum_exponents(a, 0.7, m, -0.3);
        CHECK(std::fabs(1.0 / s.q - (1.0 + 1.0 / (2.0 * a) + 1.0 / m)) < 1e-12);
        CHECK(s.q < 1.0);
        CHECK(s.q > 0.0);
    }
    // bounded-summand sentinel
    const StoppedSumExponents inf_a = stopped_sum_exponents(kInf, 0.0, 1.0, 0.0);
    CHECK(inf_a.q == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(inf_a.w == doctest::Approx(0.5).epsilon(1e-15));
    // induced moment curve grows in p
    CHECK(e.moment_curve(4.0) > e.moment_curve(2.0));
    CHECK_THROWS_AS(stopped_sum_exponents(-1.0, 0.0, 2.0, 0.0), DomainError);
}

TEST_CASE("moment growth reference curves") {
    const std::vector<double> grid{2, 4, 8, 16, 32, 64, 100};
    const auto rows = moment_growth_comparison(2.0, grid);
    REQUIRE(rows.size() == grid.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].curve_main > rows[i - 1].curve_main);
        CHECK(rows[i].curve_ref_log > rows[i - 1].curve_ref_log);
        CHECK(rows[i].curve_ref_root_log > rows[i - 1].curve_ref_root_log);
    }
    // at m = 2 the main curve has p-exponent 1 against the references' 1.5
    const auto& last = rows.back();
    CHECK(last.curve_main < last.curve_ref_log);
    CHECK(last.curve_main < last.curve_ref_root_log);
    // m = inf: all three share the p-exponent 1
    const auto inf_rows = moment_growth_comparison(kInf, grid);
    const double ratio_main =
        std::log(inf_rows.back().curve_main / inf_rows[4].curve_main);
    const double ratio_ref =
        std::log(inf_rows.back().curve_ref_root_log / inf_rows[4].curve_ref_root_log);
    CHECK(ratio_main == doctest::Approx(ratio_ref).epsilon(1e-12));
    CHECK_THROWS_AS(moment_growth_comparison(0.9, grid), DomainError);
}

TEST_CASE("bound curve: monotone values and populated diagnostics") {
    const TailFunction normal = TailFunction::standard_normal();
    const CumulantModel model = CumulantModel::normal();
    const IndexLaw geo = IndexLaw::geometric(4.0);
    std::vector<double> grid;
    for (double x = 0.0; x <= 6.0; x += 0.25) grid.push_back(x);
    const BoundCurve curve = compute_bound_curve(normal, model, geo, 1.0, grid);
    REQUIRE(curve.x.size() == grid.size());
    for (std::size_t i = 0; i < curve.value.size(); ++i) {
        CHECK(curve.value[i] <= 1.0);
        CHECK(curve.value[i] >= 0.0);
        if (curve.x[i] > 0) CHECK(curve.value[i] <= 1.0 / (curve.x[i] * curve.x[i]) + 1e-12);
        if (i > 0) CHECK(curve.value[i] <= curve.value[i - 1]);
        CHECK(curve.dominant_n[i] >= 1);
    }
}
