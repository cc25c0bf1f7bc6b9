#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hcnet/asymptotics.hpp"
#include "hcnet/bd.hpp"
#include "hcnet/commands.hpp"
#include "hcnet/config.hpp"
#include "hcnet/error.hpp"
#include "hcnet/mixing.hpp"
#include "hcnet/model.hpp"
#include "hcnet/simulate.hpp"

namespace py = pybind11;
using namespace hcnet;

namespace {

StarState to_state(const std::pair<int, int>& s) { return s.second == 0 ? StarState::root() : StarState{s.first, s.second}; }

Network make_network(const std::vector<int>& sizes, const std::vector<std::string>& exponents,
                     std::vector<double> coefficients) {
    if (exponents.size() != sizes.size()) throw Error(ErrorCode::ConfigError, "one exponent per component");
    if (coefficients.empty()) coefficients.assign(sizes.size(), 1.0);
    if (coefficients.size() != sizes.size()) throw Error(ErrorCode::ConfigError, "one coefficient per component");
    NetworkSpec spec;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        spec.components.push_back({sizes[i], {coefficients[i], Rational::parse(exponents[i])}, {}, {}});
    return validate_spec(spec);
}

py::dict term_dict(const PowerTerm& t) {
    py::dict d;
    d["coefficient"] = t.coefficient;
    d["exponent"] = t.exponent.str();
    return d;
}

py::dict classification_dict(const BranchClassification& c) {
    py::dict d;
    d["scenario"] = c.scenario;
    d["alias"] = c.alias;
    d["alpha"] = c.alpha;
    d["gamma"] = c.gamma;
    d["beta"] = c.beta;
    d["K_star"] = c.K_star;
    d["N"] = c.N;
    d["A"] = c.A;
    d["S"] = c.S;
    d["asymptotic_mean"] = term_dict(asym_mean_transition(c));
    return d;
}

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data()); }

}  // namespace

PYBIND11_MODULE(_hcnet, m) {
    m.doc() = "Hitting times, limit laws, starvation and mixing on hard-core random-access networks";
    m.attr("__version__") = HCNET_VERSION;

    py::register_exception<Error>(m, "HcnetError", PyExc_RuntimeError);

    py::class_<Network>(m, "Network")
        .def(py::init(&make_network), py::arg("sizes"), py::arg("exponents"),
             py::arg("coefficients") = std::vector<double>{})
        .def_property_readonly("num_components", &Network::num_components)
        .def("size", &Network::size, py::arg("k"));

    m.def(
        "classify",
        [](const Network& net, int k1, int l1, int k2, int l2) { return classification_dict(classify(net, k1, l1, k2, l2)); },
        py::arg("net"), py::arg("k1"), py::arg("l1"), py::arg("k2"), py::arg("l2"));

    py::class_<LimitLaw>(m, "LimitLaw")
        .def(py::init([](const Network& net, int k1, int l1, int k2, int l2) {
                 return LimitLaw(classify(net, k1, l1, k2, l2));
             }),
             py::arg("net"), py::arg("k1"), py::arg("l1"), py::arg("k2"), py::arg("l2"))
        .def_property_readonly("alpha", &LimitLaw::alpha)
        .def_property_readonly("atom_at_zero", &LimitLaw::atom_at_zero)
        .def_property_readonly("mean", &LimitLaw::mean)
        .def_property_readonly("scenario", &LimitLaw::scenario)
        .def("cdf", &LimitLaw::cdf, py::arg("x"))
        .def("pdf", &LimitLaw::pdf, py::arg("x"))
        .def("laplace", py::overload_cast<double>(&LimitLaw::laplace, py::const_), py::arg("s"));

    m.def(
        "exact_mean_transition",
        [](const Network& net, double nu, std::pair<int, int> s, std::pair<int, int> t) {
            return exact_mean_transition(net, nu, to_state(s), to_state(t));
        },
        py::arg("net"), py::arg("nu"), py::arg("source"), py::arg("target"));

    m.def(
        "sample_transition",
        [](const Network& net, std::pair<int, int> s, std::pair<int, int> t, double nu, std::int64_t replications,
           std::uint64_t seed, int workers, bool accelerated) {
            SimOptions opt;
            opt.nu = nu;
            opt.replications = replications;
            opt.seed = seed;
            opt.workers = workers;
            opt.accelerated = accelerated;
            SimReport rep;
            {
                py::gil_scoped_release release;
                rep = sample_transition(net, to_state(s), to_state(t), opt);
            }
            return py::make_tuple(as_array(rep.samples), rep.censored);
        },
        py::arg("net"), py::arg("source"), py::arg("target"), py::arg("nu"), py::arg("replications") = 1000,
        py::arg("seed") = 0, py::arg("workers") = 1, py::arg("accelerated") = true);

    m.def(
        "mean_hitting",
        [](int L, double nu, int l1, int l2, const std::string& exponent, double coefficient) {
            return mean_hitting(BDBranch::standard(L, {coefficient, Rational::parse(exponent)}), l1, l2, nu);
        },
        py::arg("L"), py::arg("nu"), py::arg("l1"), py::arg("l2") = 0, py::arg("exponent") = "1",
        py::arg("coefficient") = 1.0);

    m.def(
        "escape_spectrum",
        [](int L, double nu, const std::string& exponent, double coefficient) {
            return as_array(escape_spectrum(BDBranch::standard(L, {coefficient, Rational::parse(exponent)}), nu).eigenvalues);
        },
        py::arg("L"), py::arg("nu"), py::arg("exponent") = "1", py::arg("coefficient") = 1.0);

    m.def(
        "branch_conductance", [](const Network& net, double nu, int k) { return branch_conductance(net, nu, k).phi; },
        py::arg("net"), py::arg("nu"), py::arg("k"));
    m.def(
        "mixing_lower_bound",
        [](const Network& net, double nu, double r, double epsilon) {
            const auto b = mixing_lower_bound(net, nu, r, epsilon);
            py::dict d;
            d["kappa"] = b.kappa;
            d["phi"] = b.phi;
            d["bound"] = b.bound;
            d["asymptotic"] = term_dict(b.asymptotic);
            d["certification"] = b.certification;
            return d;
        },
        py::arg("net"), py::arg("nu"), py::arg("r") = 0.5, py::arg("epsilon") = 0.1);
    m.def("tv_distance", &tv_distance, py::arg("net"), py::arg("nu"), py::arg("t"));
    m.def("t_mix_exact", &t_mix_exact, py::arg("net"), py::arg("nu"), py::arg("epsilon") = 0.1);

    m.def("command_names", &command_names);
    m.def(
        "run_command",
        [](const std::string& name, const std::string& config_text) {
            const auto cfg = parse_config(config_text);
            CommandOutput out;
            {
                py::gil_scoped_release release;
                out = run_command(name, cfg);
            }
            py::dict files;
            for (const auto& [file, bytes] : out.files) files[py::str(file)] = py::bytes(bytes);
            py::dict d;
            d["files"] = files;
            d["summary"] = out.summary;
            d["warnings"] = out.warnings;
            d["exit_code"] = out.exit_code;
            return d;
        },
        py::arg("name"), py::arg("config_text"));
}
