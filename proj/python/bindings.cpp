#include "dmckf/complexity.hpp"
#include "dmckf/config.hpp"
#include "dmckf/correntropy.hpp"
#include "dmckf/diagnostics.hpp"
#include "dmckf/errors.hpp"
#include "dmckf/harness.hpp"
#include "dmckf/linalg.hpp"
#include "dmckf/network.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace dmckf;

namespace {

AugmentedSystem make_augmented(const Vector& d, const Matrix& w) {
    if (d.size() != w.rows()) throw DimensionMismatch("d and w must have the same number of rows");
    if (w.cols() == 0) throw DimensionMismatch("w has no columns");
    AugmentedSystem aug;
    aug.d = d;
    aug.w = w;
    aug.prior = Vector::Zero(w.cols());
    return aug;
}

ExperimentConfig config_from(const std::string& json_text) { return parse_config(json_text); }

py::dict records_to_dict(const std::vector<MsdRecord>& recs) {
    const auto n = static_cast<py::ssize_t>(recs.size());
    py::array_t<std::int64_t> trial(n), step(n), node(n), iterations(n);
    py::array_t<double> sigma(n), p(n), sq(n);
    py::list algorithm;
    auto t = trial.mutable_unchecked<1>();
    auto s = step.mutable_unchecked<1>();
    auto nd = node.mutable_unchecked<1>();
    auto it = iterations.mutable_unchecked<1>();
    auto sg = sigma.mutable_unchecked<1>();
    auto pp = p.mutable_unchecked<1>();
    auto e = sq.mutable_unchecked<1>();
    for (py::ssize_t k = 0; k < n; ++k) {
        const auto& r = recs[static_cast<std::size_t>(k)];
        t(k) = static_cast<std::int64_t>(r.trial);
        s(k) = static_cast<std::int64_t>(r.step + 1);
        nd(k) = static_cast<std::int64_t>(r.node + 1);
        it(k) = r.iterations;
        sg(k) = r.sigma;
        pp(k) = r.p;
        e(k) = r.sq_error;
        algorithm.append(std::string(algorithm_name(r.algorithm)));
    }
    py::dict out;
    out["trial"] = trial;
    out["step"] = step;
    out["node"] = node;
    out["algorithm"] = algorithm;
    out["sigma"] = sigma;
    out["p"] = p;
    out["sq_error"] = sq;
    out["iterations"] = iterations;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Distributed maximum-correntropy Kalman filtering with packet drops";

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error.ptr(), (e.kind() + ": " + e.what()).c_str());
        }
    });

    m.def("cholesky", &cholesky, py::arg("a"));
    m.def("gaussian_kernel", &gaussian_kernel, py::arg("e"), py::arg("sigma"));
    m.def("sample_correntropy", &sample_correntropy, py::arg("xs"), py::arg("ys"), py::arg("sigma"));
    m.def("correntropy_taylor", &correntropy_taylor, py::arg("xs"), py::arg("ys"), py::arg("sigma"),
          py::arg("order"));

    py::class_<ComplexityCount>(m, "ComplexityCount")
        .def_readonly("add_mult", &ComplexityCount::add_mult)
        .def_readonly("special", &ComplexityCount::special)
        .def("__repr__", [](const ComplexityCount& c) {
            return "ComplexityCount(add_mult=" + format_number(c.add_mult) + ", special=" +
                   format_number(c.special) + ")";
        });
    m.def("sdkf_flops", &sdkf_flops, py::arg("n"), py::arg("m"));
    m.def("dmckf_flops", &dmckf_flops, py::arg("n"), py::arg("m"), py::arg("t"));

    py::class_<AugmentedSystem>(m, "Augmented", "Whitened regression d = w x + e of one filter step")
        .def(py::init(&make_augmented), py::arg("d"), py::arg("w"))
        .def_readonly("d", &AugmentedSystem::d)
        .def_readonly("w", &AugmentedSystem::w)
        .def_readonly("prior", &AugmentedSystem::prior)
        .def_property_readonly("state_dim", &AugmentedSystem::state_dim);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("zeta", &ConvergenceReport::zeta)
        .def_readonly("beta", &ConvergenceReport::beta)
        .def_readonly("sigma", &ConvergenceReport::sigma)
        .def_readonly("sigma_star", &ConvergenceReport::sigma_star)
        .def_readonly("sigma_diamond", &ConvergenceReport::sigma_diamond)
        .def_readonly("alpha", &ConvergenceReport::alpha)
        .def_readonly("f_norm", &ConvergenceReport::f_norm)
        .def_readonly("jacobian_norm", &ConvergenceReport::jacobian_norm)
        .def_readonly("probes", &ConvergenceReport::probes)
        .def_readonly("satisfied", &ConvergenceReport::satisfied);

    m.def("zeta_bound", &zeta_bound, py::arg("aug"));
    m.def("phi", &phi, py::arg("sigma"), py::arg("beta"), py::arg("aug"));
    m.def("psi", &psi, py::arg("sigma"), py::arg("beta"), py::arg("aug"));
    m.def(
        "solve_sigma_thresholds",
        [](double beta, double alpha, const AugmentedSystem& aug) {
            const SigmaThresholds t = solve_sigma_thresholds(beta, alpha, aug);
            return py::make_tuple(t.sigma_star, t.sigma_diamond);
        },
        py::arg("beta"), py::arg("alpha"), py::arg("aug"), "(sigma_star, sigma_diamond)");
    m.def("fixed_point_map", &fixed_point_map, py::arg("x"), py::arg("aug"), py::arg("sigma"));
    m.def("jacobian_f", &jacobian_f, py::arg("x"), py::arg("aug"), py::arg("sigma"));
    m.def("verify_contraction", &verify_contraction, py::arg("aug"), py::arg("sigma"), py::arg("beta"),
          py::arg("probes") = kDefaultProbes, py::arg("alpha") = py::none(),
          py::arg("seed") = kDefaultProbeSeed);
    m.def("convergence_report", &convergence_report, py::arg("aug"), py::arg("beta"), py::arg("alpha"),
          py::arg("scale") = 1.0, py::arg("probes") = kDefaultProbes, py::arg("seed") = kDefaultProbeSeed);

    m.def("default_topology_edge_list", [] { return std::string(default_topology_edge_list()); });

    m.def(
        "parse_config", [](const std::string& text) { return config_to_json(config_from(text)); },
        py::arg("json_text"), "Validate a JSON config and return it with every default filled in");
    m.def(
        "config_to_json", [] { return config_to_json(ExperimentConfig{}); },
        "The default config as JSON");

    m.def(
        "run_trial",
        [](const std::string& config_json, std::size_t trial) {
            const ExperimentConfig cfg = config_from(config_json);
            std::vector<MsdRecord> recs;
            {
                py::gil_scoped_release release;
                recs = run_trial(cfg, trial);
            }
            return records_to_dict(recs);
        },
        py::arg("config_json"), py::arg("trial"),
        "Records of one trial as numpy columns; step and node are one-based");
    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const ExperimentConfig cfg = config_from(config_json);
            ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = run_experiment(cfg);
            }
            py::list rows;
            for (const auto& r : res.rows) {
                py::dict row;
                row["node"] = r.node ? py::object(py::int_(*r.node + 1)) : py::object(py::str("network"));
                row["algorithm"] = std::string(algorithm_name(r.algorithm));
                row["sigma"] = r.sigma;
                row["p"] = r.p;
                row["msd_db"] = r.msd_db;
                row["msd_se_db"] = r.msd_se_db;
                row["avg_iterations"] = r.avg_iterations;
                row["non_converged_steps"] = r.non_converged;
                rows.append(row);
            }
            return rows;
        },
        py::arg("config_json"), "Summary rows, one per (node, algorithm, sigma, p) plus network averages");
    m.def(
        "msd_db",
        [](const py::array_t<double>& sq_error) {
            auto v = sq_error.unchecked<1>();
            std::vector<MsdRecord> recs(static_cast<std::size_t>(v.shape(0)));
            for (py::ssize_t k = 0; k < v.shape(0); ++k) recs[static_cast<std::size_t>(k)].sq_error = v(k);
            return msd_db(recs, 0);
        },
        py::arg("sq_error"), "10 log10 of the mean squared error");
    m.def(
        "capture_step",
        [](const std::string& config_json, std::size_t trial, std::size_t step, std::size_t node) {
            if (step < 1 || node < 1) throw InvalidParameter("step and node are one-based");
            return capture_step(config_from(config_json), trial, step - 1, node - 1);
        },
        py::arg("config_json"), py::arg("trial"), py::arg("step"), py::arg("node"),
        "Whitened regression solved at a given one-based step and node");
}
