#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "randsum/bounds.hpp"
#include "randsum/errors.hpp"
#include "randsum/lower.hpp"
#include "randsum/mc.hpp"
#include "randsum/report.hpp"
#include "randsum/special.hpp"

namespace py = pybind11;
using namespace randsum;

PYBIND11_MODULE(_core, m) {
    m.doc() = "exponential tail bounds for normed random sums, with Monte Carlo verification";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<SumExponents>(m, "SumExponents")
        .def_readonly("power", &SumExponents::power)
        .def_readonly("log_power", &SumExponents::log_power)
        .def("__repr__", [](const SumExponents& e) {
            return "SumExponents(power=" + std::to_string(e.power) +
                   ", log_power=" + std::to_string(e.log_power) + ")";
        });
    m.def("sum_exponents", &sum_exponents, py::arg("m"), py::arg("r"),
          "Tail exponents of normalized sums for summands with tail exp(-c1 x^m log^r(c2+x))");

    py::class_<OrliczTailSpec>(m, "OrliczTailSpec")
        .def(py::init<double, double, double, double>(), py::arg("m"), py::arg("r"),
             py::arg("c1") = 1.0, py::arg("c2") = kDefaultLogShift)
        .def_static("bounded", &OrliczTailSpec::bounded, py::arg("ess_sup"))
        .def_property_readonly("m", &OrliczTailSpec::m)
        .def_property_readonly("r", &OrliczTailSpec::r)
        .def_property_readonly("sd", &OrliczTailSpec::sd)
        .def("tail", &OrliczTailSpec::tail, py::arg("x"))
        .def("exponents", &OrliczTailSpec::exponents);

    py::class_<TailFunction>(m, "TailFunction")
        .def_static("standard_normal", &TailFunction::standard_normal)
        .def_static("orlicz", &TailFunction::orlicz, py::arg("spec"))
        .def_static("empirical", &TailFunction::empirical, py::arg("xs"), py::arg("values"))
        .def_static("empirical_from_csv", &TailFunction::empirical_from_csv, py::arg("path"))
        .def("__call__", &TailFunction::operator(), py::arg("x"))
        .def("second_moment", &TailFunction::second_moment)
        .def("second_moment_tail", &TailFunction::second_moment_tail, py::arg("z"));

    py::class_<IndexLaw>(m, "IndexLaw")
        .def_static("geometric", &IndexLaw::geometric, py::arg("mean"))
        .def_static("shifted_poisson", &IndexLaw::shifted_poisson, py::arg("mean"))
        .def_static("deterministic", &IndexLaw::deterministic, py::arg("n"))
        .def_static("two_point", &IndexLaw::two_point, py::arg("k"))
        .def_static("two_point_for_level", &IndexLaw::two_point_for_level, py::arg("x"))
        .def_static("explicit_probs", &IndexLaw::explicit_probs, py::arg("probs"))
        .def_property_readonly("mean", &IndexLaw::mean)
        .def("pmf", &IndexLaw::pmf, py::arg("n"))
        .def("tail_mass", &IndexLaw::tail_mass, py::arg("n"))
        .def("describe", &IndexLaw::describe);

    py::class_<CumulantModel>(m, "CumulantModel")
        .def_static("normal", &CumulantModel::normal, py::arg("sd") = 1.0)
        .def_static("two_point", &CumulantModel::two_point, py::arg("magnitude") = 1.0)
        .def_static("from_tail", &CumulantModel::from_tail, py::arg("tail"))
        .def_static("from_samples", &CumulantModel::from_samples, py::arg("samples"))
        .def("log_mgf", &CumulantModel::log_mgf, py::arg("lam"))
        .def_property_readonly("cramer_radius", &CumulantModel::cramer_radius)
        .def_property_readonly("variance", &CumulantModel::variance);

    m.def("truncation_bound", &truncation_bound, py::arg("tail"), py::arg("x"));
    m.def("sum_cumulant", &sum_cumulant, py::arg("model"), py::arg("lam"));
    m.def("rate_function", &rate_function, py::arg("model"), py::arg("x"));
    m.def(
        "uniform_sum_bound",
        [](const TailFunction& t, const CumulantModel& c, double x) {
            const BranchValue v = uniform_sum_bound(t, c, x);
            return py::make_tuple(v.value, branch_name(v.branch));
        },
        py::arg("tail"), py::arg("model"), py::arg("x"),
        "Bound on sup_n P(|n^{-1/2} sum| >= x); returns (value, winning_branch)");
    m.def("random_sum_bound", &random_sum_bound, py::arg("tail"), py::arg("model"),
          py::arg("index"), py::arg("sigma"), py::arg("x"), py::arg("eps_tail") = 1e-12);
    m.def("dominant_index", &dominant_index, py::arg("index"), py::arg("exponents"), py::arg("x"),
          py::arg("c") = 1.0, py::arg("c2") = kDefaultLogShift);
    m.def("closed_form_geometric_bound", &closed_form_geometric_bound, py::arg("exponents"),
          py::arg("c"), py::arg("cap"), py::arg("x"));
    m.def("closed_form_poisson_bound", &closed_form_poisson_bound, py::arg("exponents"),
          py::arg("c"), py::arg("cap"), py::arg("x"));

    py::class_<StoppedSumExponents>(m, "StoppedSumExponents")
        .def_readonly("q", &StoppedSumExponents::q)
        .def_readonly("w", &StoppedSumExponents::w)
        .def("moment_curve", &StoppedSumExponents::moment_curve, py::arg("p"));
    m.def("stopped_sum_exponents", &stopped_sum_exponents, py::arg("a"), py::arg("b"),
          py::arg("m"), py::arg("r"));

    py::class_<TwoPointTail>(m, "TwoPointTail")
        .def_readonly("exact", &TwoPointTail::exact)
        .def_readonly("heavy_term", &TwoPointTail::heavy_term)
        .def_readonly("floor_value", &TwoPointTail::floor_value);
    m.def("exact_two_point_tail", &exact_two_point_tail, py::arg("x"));

    py::class_<SummandLaw>(m, "SummandLaw")
        .def_static("standard_normal", &SummandLaw::standard_normal)
        .def_static("orlicz", &SummandLaw::orlicz, py::arg("spec"))
        .def_static("two_point_pm1", &SummandLaw::two_point_pm1)
        .def("sd", &SummandLaw::sd)
        .def("tail", &SummandLaw::tail)
        .def("make_cumulant", &SummandLaw::make_cumulant)
        .def("describe", &SummandLaw::describe);

    py::class_<EmpiricalTail>(m, "EmpiricalTail")
        .def_readonly("x", &EmpiricalTail::x)
        .def_readonly("estimate", &EmpiricalTail::estimate)
        .def_readonly("ci_low", &EmpiricalTail::ci_low)
        .def_readonly("ci_high", &EmpiricalTail::ci_high)
        .def_readonly("hits", &EmpiricalTail::hits)
        .def_readonly("n_samples", &EmpiricalTail::n_samples)
        .def_readonly("seed", &EmpiricalTail::seed)
        .def_readonly("sample_mean", &EmpiricalTail::sample_mean)
        .def_readonly("sample_variance", &EmpiricalTail::sample_variance)
        .def_readonly("spec_id", &EmpiricalTail::spec_id);
    m.def(
        "simulate_tail",
        [](const SummandLaw& summand, const IndexLaw& index, const std::vector<double>& x_grid,
           std::uint64_t n_samples, std::uint64_t seed, double ci_level, int threads) {
            CompoundSpec spec{summand, index};
            SimulateOptions options;
            options.ci_level = ci_level;
            options.threads = threads;
            return simulate_tail(spec, x_grid, n_samples, seed, options);
        },
        py::arg("summand"), py::arg("index"), py::arg("x_grid"), py::arg("n_samples"),
        py::arg("seed"), py::arg("ci_level") = 0.99, py::arg("threads") = 1);

    m.def(
        "clopper_pearson",
        [](std::uint64_t hits, std::uint64_t n, double level) {
            const BinomialCi ci = clopper_pearson(hits, n, level);
            return py::make_tuple(ci.low, ci.high);
        },
        py::arg("hits"), py::arg("n"), py::arg("level") = 0.99);
    m.def("normal_upper_tail", &normal_upper_tail, py::arg("x"));
    m.def(
        "orlicz_norm_estimate",
        [](const std::vector<double>& samples, double m_shape, double r,
           const std::vector<double>& p_grid) {
            return orlicz_norm_estimate(samples, m_shape, r, p_grid);
        },
        py::arg("samples"), py::arg("m"), py::arg("r"), py::arg("p_grid"));
    m.def("default_p_grid", &default_p_grid);

    m.attr("__version__") = kToolVersion;
}
