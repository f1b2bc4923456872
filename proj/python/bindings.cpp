#include "mfccert/config.hpp"
#include "mfccert/report.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using nlohmann::json;

namespace {

mfc::ScenarioConfig config_from(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw mfc::ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return mfc::parse_config(j);
}

Eigen::VectorXd dense(const mfc::Vector& v)
{
    return v;
}

py::dict trajectory_dict(const mfc::Trajectory& t)
{
    const auto n = static_cast<Eigen::Index>(t.size());
    const Eigen::Index dim = n ? t.x.front().size() : 0;
    Eigen::MatrixXd x(n, dim), xs(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        x.row(i) = t.x[i].transpose();
        xs.row(i) = t.x_star[i].transpose();
    }
    py::dict d;
    d["t"] = Eigen::Map<const Eigen::VectorXd>(t.t.data(), n).eval();
    d["x"] = x;
    d["x_star"] = xs;
    d["u"] = Eigen::Map<const Eigen::VectorXd>(t.u.data(), n).eval();
    d["V"] = Eigen::Map<const Eigen::VectorXd>(t.V.data(), n).eval();
    return d;
}

std::string simulate_json(const std::string& cfg_text)
{
    const auto a = mfc::analyze(config_from(cfg_text));
    json out = json::array();
    for (const auto& run : mfc::simulate_all(a, mfc::steady_states(a)))
        out.push_back(mfc::to_json(run));
    return out.dump();
}

py::list simulate_trajectories(const std::string& cfg_text)
{
    const auto a = mfc::analyze(config_from(cfg_text));
    py::list out;
    for (const auto& run : mfc::simulate_all(a, mfc::steady_states(a))) {
        py::dict d;
        d["label"] = run.label;
        d["trajectory"] = run.trajectory ? py::object(trajectory_dict(*run.trajectory)) : py::none();
        out.append(d);
    }
    return out;
}

std::string falsify_json(const std::string& cfg_text)
{
    const auto a = mfc::analyze(config_from(cfg_text));
    json out = json::array();
    for (const auto& r : mfc::falsify_all(a, mfc::roa(a)))
        out.push_back(mfc::to_json(r));
    return out.dump();
}

std::string reproduce_json(const std::string& cfg_text, const std::string& tol_text)
{
    mfc::Tolerances tol = mfc::Tolerances::defaults();
    if (!tol_text.empty())
        tol.apply(json::parse(tol_text));
    const auto rep = mfc::reproduce(config_from(cfg_text), tol);
    return json{{"all_pass", rep.all_pass()}, {"summary", mfc::to_json(rep.summary)}}.dump();
}

} // namespace

PYBIND11_MODULE(_mfccert, m)
{
    m.doc() = "Model-following control design and certification for Brunovsky plants";

    py::register_exception<mfc::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<mfc::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("place_poles", [](std::vector<std::complex<double>> roots) {
        return dense(mfc::place_poles(static_cast<int>(roots.size()), roots));
    }, py::arg("roots"));
    m.def("high_gain", [](const Eigen::VectorXd& k_star, double epsilon) {
        const auto h = mfc::high_gain(k_star, epsilon);
        return py::make_tuple(dense(h.k_tilde), Eigen::MatrixXd(h.D));
    }, py::arg("k_star"), py::arg("epsilon"));
    m.def("solve_lyapunov", [](const Eigen::VectorXd& k_star) { return Eigen::MatrixXd(mfc::solve_lyapunov(k_star)); },
          py::arg("k_star"));
    m.def("gamma_mfc", [](double eps, double vartheta, const Eigen::MatrixXd& P) { return mfc::gamma_mfc(eps, vartheta, P); },
          py::arg("epsilon"), py::arg("vartheta"), py::arg("P"));
    m.def("gamma_sl", [](const Eigen::MatrixXd& P) { return mfc::gamma_sl(P); }, py::arg("P"));
    m.def("gamma_slhg", [](double eps, const Eigen::MatrixXd& P) { return mfc::gamma_slhg(eps, P); },
          py::arg("epsilon"), py::arg("P"));
    m.def("solve_cubic", [](double a3, double a2, double a1, double a0) { return mfc::solve_cubic({a3, a2, a1, a0}); },
          py::arg("a3"), py::arg("a2"), py::arg("a1"), py::arg("a0"));

    m.def("_preset", [](const std::string& name) { return mfc::to_json(mfc::preset(name)).dump(); });
    m.def("_normalize", [](const std::string& text) { return mfc::to_json(config_from(text)).dump(); });
    m.def("_analyze", [](const std::string& text) { return mfc::to_json(mfc::analyze(config_from(text))).dump(); });
    m.def("_steady_state", [](const std::string& text) {
        return mfc::to_json(mfc::steady_states(mfc::analyze(config_from(text)))).dump();
    });
    m.def("_roa", [](const std::string& text) { return mfc::to_json(mfc::roa(mfc::analyze(config_from(text)))).dump(); });
    m.def("_simulate", &simulate_json);
    m.def("_trajectories", &simulate_trajectories);
    m.def("_falsify", &falsify_json, py::call_guard<py::gil_scoped_release>());
    m.def("_reproduce", &reproduce_json, py::call_guard<py::gil_scoped_release>());
}
