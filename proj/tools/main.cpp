#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cheshire/acceptance.hpp"
#include "cheshire/basis.hpp"
#include "cheshire/optics.hpp"
#include "cheshire/scenario.hpp"

namespace {

using namespace cheshire;

enum Exit { ok = 0, usage = 2, parse = 3, computation = 4, verification = 5 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string load_scenario_text(const std::string &ref) {
    std::string name = ref.rfind("bundle:", 0) == 0 ? ref.substr(7) : ref;
    if (auto text = scenario::find_bundle(name)) {
        return std::string(*text);
    }
    if (ref.rfind("bundle:", 0) == 0) {
        std::string valid;
        for (const auto &b : scenario::bundles()) {
            valid += valid.empty() ? "" : ", ";
            valid += b.name;
        }
        throw UsageError("unknown bundle '" + name + "' (valid: " + valid + ")");
    }
    std::ifstream in(ref, std::ios::binary);
    if (!in) {
        throw scenario::ScenarioError(scenario::ErrorKind::syntax, "", "cannot read scenario file '" + ref + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct RunArgs {
    std::string scenario;
    std::vector<std::string> overrides;
    std::vector<std::string> axes;
    std::string format = "csv";
    std::string out;
};

scenario::SweepAxis parse_axis(const std::string &text) {
    // path=start:stop:steps
    auto eq = text.find('=');
    auto c1 = text.find(':', eq == std::string::npos ? 0 : eq);
    auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
    if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos) {
        throw UsageError("--axis expects path=start:stop:steps, got '" + text + "'");
    }
    scenario::SweepAxis axis;
    axis.path = text.substr(0, eq);
    try {
        axis.start = std::stod(text.substr(eq + 1, c1 - eq - 1));
        axis.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        axis.steps = static_cast<std::size_t>(std::stoul(text.substr(c2 + 1)));
    } catch (const std::exception &) {
        throw UsageError("--axis expects numeric start:stop:steps, got '" + text + "'");
    }
    return axis;
}

int cmd_run(const RunArgs &args) {
    auto doc = scenario::parse_scenario(load_scenario_text(args.scenario));
    for (const auto &o : args.overrides) {
        scenario::apply_override(doc, o);
    }
    for (const auto &a : args.axes) {
        auto axis = parse_axis(a);
        std::erase_if(doc.sweep, [&](const auto &s) { return s.path == axis.path; });
        doc.sweep.push_back(axis);
    }
    scenario::validate(doc);
    auto records = scenario::run_scenario(doc);
    std::string text = args.format == "csv" ? scenario::to_csv(records) : scenario::to_jsonl(records);
    if (args.out.empty() || args.out == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        std::ofstream out(args.out, std::ios::binary);
        out << text;
        if (!out) {
            std::cerr << "error: cannot write '" << args.out << "'\n";
            return computation;
        }
    }
    for (const auto &r : records) {
        if (!r.error.empty()) {
            std::cerr << "error in record";
            for (const auto &[path, v] : r.point) {
                std::cerr << " " << path << "=" << scenario::format_number(v);
            }
            std::cerr << ": " << r.error << "\n";
        }
    }
    for (const auto &r : records) {
        if (!r.error.empty()) {
            return computation;
        }
    }
    return ok;
}

int cmd_list() {
    for (const auto &b : scenario::bundles()) {
        auto doc = scenario::parse_scenario(b.text);
        std::cout << b.name << "\t" << optics::to_string(doc.preselect.state) << " -> "
                  << optics::to_string(doc.postselect.state);
        if (doc.coupling) {
            std::cout << "\t" << to_string(doc.coupling->variant);
        }
        std::cout << "\n";
    }
    return ok;
}

int cmd_verify(const std::optional<std::string> &only, const std::string &sign) {
    acceptance::Options opt;
    opt.only = only;
    auto s = parse_sign(sign);
    if (!s) {
        throw UsageError("--sign must be consistent or paper");
    }
    opt.sign = *s;
    std::vector<acceptance::CheckResult> results;
    try {
        results = acceptance::run(opt);
    } catch (const ValueError &e) {
        throw UsageError(e.what());
    }
    for (const auto &r : results) {
        std::cout << acceptance::format_line(r) << "\n";
    }
    bool pass = acceptance::all_passed(results);
    std::cout << (pass ? "all checks passed" : "some checks failed") << "\n";
    return pass ? ok : verification;
}

int cmd_show_state(const std::string &id_text, std::optional<double> theta, std::optional<double> alpha) {
    auto id = optics::parse_state_id(id_text);
    if (!id) {
        std::string valid;
        for (auto s : optics::all_states()) {
            valid += valid.empty() ? "" : ", ";
            valid += optics::to_string(s);
        }
        throw UsageError("unknown state '" + id_text + "' (valid: " + valid + ")");
    }
    scenario::Selection sel;
    sel.state = *id;
    if (optics::uses_theta(*id)) sel.theta = theta.value_or(0.5);
    if (optics::uses_alpha(*id)) sel.alpha = alpha.value_or(0.25);
    Ket ket = optics::prepare_state(*id, sel.radians());

    // Display polarization in {H, V}.
    const auto &sig = ket.signature();
    Operator to_hv(basis::polarization(), CMatrix(basis::hv_to_storage().adjoint()));
    Ket shown = extend(to_hv, sig) * ket;

    std::cout << optics::to_string(*id);
    if (sel.theta) std::cout << "  theta=" << scenario::format_number(*sel.theta) << " pi";
    if (sel.alpha) std::cout << "  alpha=" << scenario::format_number(*sel.alpha) << " pi";
    std::cout << "\nbasis:";
    auto names = [](const std::string &label) -> std::vector<std::string> {
        if (label == labels::kPath) return {"L", "R"};
        if (label == labels::kOrbital) return {"v_a", "v_b"};
        return {"H", "V"};
    };
    for (std::size_t i = 0; i < sig.rank(); ++i) {
        auto n = names(sig.factors()[i].label);
        std::cout << (i ? " x " : " ") << sig.factors()[i].label << "{" << n[0] << "," << n[1] << "}";
    }
    std::cout << "\n";
    for (std::size_t flat = 0; flat < shown.size(); ++flat) {
        auto digits = sig.digits(flat);
        std::string label = "|";
        for (std::size_t i = 0; i < digits.size(); ++i) {
            label += (i ? "," : "") + names(sig.factors()[i].label)[digits[i]];
        }
        label += ">";
        cplx a = shown[flat];
        std::cout << label << "\t" << scenario::format_number(a.real()) << "\t" << scenario::format_number(a.imag())
                  << "\n";
    }
    return ok;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Weak-value and quantum Cheshire cat simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto add_run_options = [&](CLI::App *sub) {
        sub->add_option("scenario", run_args.scenario, "Scenario file, bundle name, or bundle:NAME")->required();
        sub->add_option("--set", run_args.overrides, "Override path=value (repeatable)");
        sub->add_option("--format", run_args.format, "Output format")->check(CLI::IsMember({"csv", "records"}));
        sub->add_option("--out", run_args.out, "Output path (default stdout)");
    };
    auto *list = app.add_subcommand("list", "List bundled scenarios");
    auto *run = app.add_subcommand("run", "Run a scenario");
    add_run_options(run);
    auto *sweep = app.add_subcommand("sweep", "Run a scenario over extra sweep axes");
    add_run_options(sweep);
    sweep->add_option("--axis", run_args.axes, "Sweep axis path=start:stop:steps (repeatable)")->required();

    auto *verify = app.add_subcommand("verify", "Run the acceptance checks");
    std::optional<std::string> only;
    std::string sign = "consistent";
    verify->add_option("--only", only, "Run a single check by id or number");
    verify->add_option("--sign", sign, "Kick sign convention")->check(CLI::IsMember({"consistent", "paper"}));

    auto *show = app.add_subcommand("show-state", "Print a named state in the labeled product basis");
    std::string state_id;
    std::optional<double> theta, alpha;
    show->add_option("state", state_id, "State id")->required();
    show->add_option("--theta", theta, "theta in units of pi");
    show->add_option("--alpha", alpha, "alpha in units of pi");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (list->parsed()) return cmd_list();
        if (run->parsed() || sweep->parsed()) return cmd_run(run_args);
        if (verify->parsed()) return cmd_verify(only, sign);
        if (show->parsed()) return cmd_show_state(state_id, theta, alpha);
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const scenario::ScenarioError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return parse;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return computation;
    }
    return usage;
}
