#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cheshire/acceptance.hpp"
#include "cheshire/scenario.hpp"
#include "cheshire/weakvalue.hpp"

namespace py = pybind11;
using namespace cheshire;

namespace {

optics::StateId state(const std::string &name) {
    auto id = optics::parse_state_id(name);
    if (!id) {
        throw py::value_error("unknown state '" + name + "'");
    }
    return *id;
}

optics::StateParams params(std::optional<double> theta, std::optional<double> alpha) {
    return {theta, alpha};
}

py::dict record_dict(const scenario::ResultRecord &r) {
    py::dict d;
    d["scenario"] = r.scenario;
    py::dict point;
    for (const auto &[path, v] : r.point) point[py::str(path)] = v;
    d["point"] = point;
    py::dict wv;
    for (const auto &w : r.weak_values) wv[py::str(w.id)] = w.value;
    d["weak_values"] = wv;
    if (r.readout) {
        d["readout"] = py::dict(py::arg("mean_q") = r.readout->mean_q, py::arg("mean_p") = r.readout->mean_p,
                                py::arg("var_q") = r.readout->var_q, py::arg("var_p") = r.readout->var_p,
                                py::arg("success_prob") = r.readout->success_probability);
    } else {
        d["readout"] = py::none();
    }
    if (r.fit) {
        d["fit"] = py::dict(py::arg("A") = r.fit->A_fit, py::arg("a") = r.fit->a_fit,
                            py::arg("residual") = r.fit->residual, py::arg("accepted") = r.fit->accepted);
    } else {
        d["fit"] = py::none();
    }
    d["provenance"] = r.provenance;
    d["error"] = r.error.empty() ? py::object(py::none()) : py::object(py::str(r.error));
    return d;
}

scenario::ScenarioDoc load(const std::string &text, const std::vector<std::string> &overrides) {
    std::string body = text;
    if (auto b = scenario::find_bundle(text)) body = std::string(*b);
    auto doc = scenario::parse_scenario(body);
    for (const auto &o : overrides) scenario::apply_override(doc, o);
    scenario::validate(doc);
    return doc;
}

}  // namespace

PYBIND11_MODULE(_cheshire, m) {
    m.doc() = "Weak values, Cheshire-cat interferometry and weak-measurement meter dynamics";

    auto &base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DegeneratePostselection>(m, "DegeneratePostselection", base.ptr());
    py::register_exception<scenario::ScenarioError>(m, "ScenarioError", base.ptr());

    m.def("states", [] {
        std::vector<std::string> out;
        for (auto s : optics::all_states()) out.emplace_back(optics::to_string(s));
        return out;
    });

    m.def(
        "prepare_state",
        [](const std::string &name, std::optional<double> theta, std::optional<double> alpha) {
            auto k = optics::prepare_state(state(name), params(theta, alpha));
            std::vector<std::string> labels;
            for (const auto &f : k.signature().factors()) labels.push_back(f.label);
            return py::make_tuple(labels, CVector(k.amplitudes()));
        },
        py::arg("name"), py::arg("theta") = py::none(), py::arg("alpha") = py::none(),
        "Amplitudes in storage order; angles in radians. Polarization is stored in the (+, -) basis.");

    m.def("observables", [] {
        std::vector<std::string> out;
        for (auto id : catalog::ids()) out.emplace_back(id);
        return out;
    });

    m.def(
        "weak_value",
        [](const std::string &pre, const std::string &post, const std::string &observable,
           std::optional<double> theta, std::optional<double> alpha, double gpt) {
            return weak_value(state(pre), state(post), observable, params(theta, alpha), gpt).value;
        },
        py::arg("pre"), py::arg("post"), py::arg("observable"), py::arg("theta") = py::none(),
        py::arg("alpha") = py::none(), py::arg("gpt") = 0.0);

    m.def("cheshire_quartet", [] {
        py::dict d;
        for (const auto &r : cheshire_quartet()) d[py::str(r.observable)] = r.value;
        return d;
    });

    m.def(
        "cheshire_table",
        [](const std::vector<double> &thetas) {
            py::list rows;
            for (const auto &row : cheshire_table(thetas)) {
                py::dict d;
                for (const auto &r : row) d[py::str(r.observable)] = r.value;
                rows.append(d);
            }
            return rows;
        },
        py::arg("thetas"));

    m.def(
        "disembodiment_table",
        [](double theta, double alpha) {
            py::dict d;
            for (const auto &r : disembodiment_table(theta, alpha)) d[py::str(r.observable)] = r.value;
            return d;
        },
        py::arg("theta"), py::arg("alpha"));

    m.def(
        "noisy_effective_weak_value",
        [](const std::string &variant, double alpha, double gpt) {
            NoisyVariant v;
            if (variant == "spin_orbit") {
                v = NoisyVariant::spin_orbit;
            } else if (variant == "three_body") {
                v = NoisyVariant::three_body;
            } else {
                throw py::value_error("variant must be spin_orbit or three_body");
            }
            auto w = noisy_effective_weak_value(v, alpha, gpt);
            return py::dict(py::arg("paper") = w.paper, py::arg("direct") = w.direct);
        },
        py::arg("variant"), py::arg("alpha"), py::arg("gpt") = 0.0);

    m.def("bundles", [] {
        std::vector<std::string> out;
        for (const auto &b : scenario::bundles()) out.emplace_back(b.name);
        return out;
    });

    m.def(
        "bundle_text",
        [](const std::string &name) {
            auto t = scenario::find_bundle(name);
            if (!t) throw py::key_error(name);
            return std::string(*t);
        },
        py::arg("name"));

    m.def(
        "run_scenario",
        [](const std::string &text, const std::vector<std::string> &overrides, const std::string &format) {
            auto records = scenario::run_scenario(load(text, overrides));
            if (format == "csv") return py::object(py::str(scenario::to_csv(records)));
            if (format == "jsonl") return py::object(py::str(scenario::to_jsonl(records)));
            if (format != "records") throw py::value_error("format must be records, csv or jsonl");
            py::list out;
            for (const auto &r : records) out.append(record_dict(r));
            return py::object(out);
        },
        py::arg("scenario"), py::arg("overrides") = std::vector<std::string>{}, py::arg("format") = "records",
        "Runs a bundle name or YAML text. Overrides are path=value strings.");

    m.def(
        "verify",
        [](std::optional<std::string> only, const std::string &sign) {
            acceptance::Options opt;
            opt.only = std::move(only);
            auto s = parse_sign(sign);
            if (!s) throw py::value_error("sign must be consistent or paper");
            opt.sign = *s;
            py::list out;
            for (const auto &r : acceptance::run(opt)) {
                out.append(py::dict(py::arg("criterion") = r.criterion, py::arg("id") = r.id,
                                    py::arg("title") = r.title, py::arg("passed") = r.passed,
                                    py::arg("informational") = r.informational, py::arg("detail") = r.detail,
                                    py::arg("line") = acceptance::format_line(r)));
            }
            return out;
        },
        py::arg("only") = py::none(), py::arg("sign") = "consistent");
}
