#include "cheshire/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <thread>

#include "cheshire/weakvalue.hpp"

namespace cheshire::scenario {

namespace {

constexpr double kDefaultTheta = 0.5;
constexpr double kDefaultAlpha = 0.25;

[[noreturn]] void fail(ErrorKind kind, const std::string &field, const std::string &message,
                       const YAML::Node *at = nullptr) {
    int line = 0;
    int column = 0;
    if (at != nullptr && !at->Mark().is_null()) {
        line = at->Mark().line + 1;
        column = at->Mark().column + 1;
    }
    throw ScenarioError(kind, field, message, line, column);
}

std::string join(const std::string &a, const std::string &b) {
    return a.empty() ? b : a + "." + b;
}

void expect_map(const YAML::Node &node, const std::string &field) {
    if (!node.IsMap()) {
        fail(ErrorKind::type_mismatch, field, "expected a mapping", &node);
    }
}

void check_keys(const YAML::Node &node, const std::string &field, std::initializer_list<std::string_view> allowed) {
    for (const auto &kv : node) {
        auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            std::string valid;
            for (auto a : allowed) {
                valid += valid.empty() ? "" : ", ";
                valid += a;
            }
            fail(ErrorKind::unknown_key, join(field, key), "unknown key '" + key + "' (valid: " + valid + ")",
                 &kv.first);
        }
    }
}

std::string as_string(const YAML::Node &node, const std::string &field) {
    if (!node.IsScalar()) {
        fail(ErrorKind::type_mismatch, field, "expected a string", &node);
    }
    return node.Scalar();
}

std::optional<double> to_double(std::string_view text) {
    std::string s(text);
    if (s.empty()) {
        return std::nullopt;
    }
    // from_chars rejects a leading '+', which YAML allows.
    const char *b = s.data() + (s[0] == '+' ? 1 : 0);
    const char *e = s.data() + s.size();
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || ptr != e || !std::isfinite(out)) {
        return std::nullopt;
    }
    return out;
}

double as_double(const YAML::Node &node, const std::string &field) {
    if (!node.IsScalar()) {
        fail(ErrorKind::type_mismatch, field, "expected a number", &node);
    }
    auto v = to_double(node.Scalar());
    if (!v) {
        fail(ErrorKind::type_mismatch, field, "expected a finite number, got '" + node.Scalar() + "'", &node);
    }
    return *v;
}

std::size_t as_count(const YAML::Node &node, const std::string &field) {
    double v = as_double(node, field);
    if (v != std::floor(v) || v < 0 || v > 1e9) {
        fail(ErrorKind::type_mismatch, field, "expected a non-negative integer", &node);
    }
    return static_cast<std::size_t>(v);
}

optics::StateId state_id(const std::string &name, const std::string &field, const YAML::Node *at) {
    auto id = optics::parse_state_id(name);
    if (!id) {
        std::string valid;
        for (auto s : optics::all_states()) {
            valid += valid.empty() ? "" : ", ";
            valid += optics::to_string(s);
        }
        fail(ErrorKind::unknown_id, field, "unknown state '" + name + "' (valid: " + valid + ")", at);
    }
    return *id;
}

void fill_defaults(Selection &s) {
    if (optics::uses_theta(s.state) && !s.theta) {
        s.theta = kDefaultTheta;
    }
    if (optics::uses_alpha(s.state) && !s.alpha) {
        s.alpha = kDefaultAlpha;
    }
}

Selection parse_selection(const YAML::Node &node, const std::string &field) {
    expect_map(node, field);
    check_keys(node, field, {"state", "theta", "alpha"});
    if (!node["state"]) {
        fail(ErrorKind::missing_field, join(field, "state"), "missing state", &node);
    }
    Selection s;
    auto state_node = node["state"];
    s.state = state_id(as_string(state_node, join(field, "state")), join(field, "state"), &state_node);
    for (auto key : {"theta", "alpha"}) {
        if (auto v = node[key]) {
            bool used = std::string_view(key) == "theta" ? optics::uses_theta(s.state) : optics::uses_alpha(s.state);
            if (!used) {
                fail(ErrorKind::unknown_key, join(field, key),
                     "state " + std::string(optics::to_string(s.state)) + " takes no " + key, &v);
            }
            (std::string_view(key) == "theta" ? s.theta : s.alpha) = as_double(v, join(field, key));
        }
    }
    fill_defaults(s);
    return s;
}

template <typename E>
E parse_enum(const YAML::Node &node, const std::string &field, std::optional<E> (*parse)(std::string_view),
             const std::string &valid) {
    auto text = as_string(node, field);
    auto v = parse(text);
    if (!v) {
        fail(ErrorKind::unknown_id, field, "unknown value '" + text + "' (valid: " + valid + ")", &node);
    }
    return *v;
}

std::string variant_names() {
    std::string out = "none";
    for (auto v : all_variants()) {
        out += ", ";
        out += to_string(v);
    }
    return out;
}

std::optional<CouplingSpec> parse_coupling(const YAML::Node &node) {
    const std::string field = "coupling";
    expect_map(node, field);
    check_keys(node, field, {"variant", "g", "g_prime", "t", "kick_time", "sign", "noise", "observable"});
    CouplingSpec c;
    if (auto v = node["variant"]) {
        if (as_string(v, "coupling.variant") == "none") {
            return std::nullopt;
        }
        c.variant = parse_enum<Variant>(v, "coupling.variant", parse_variant, variant_names());
    }
    if (auto v = node["g"]) c.g = as_double(v, "coupling.g");
    if (auto v = node["g_prime"]) c.g_prime = as_double(v, "coupling.g_prime");
    if (auto v = node["t"]) c.t = as_double(v, "coupling.t");
    if (auto v = node["kick_time"]) c.kick_time = as_double(v, "coupling.kick_time");
    if (auto v = node["sign"]) c.sign = parse_enum<SignConvention>(v, "coupling.sign", parse_sign, "consistent, paper");
    if (auto v = node["noise"]) {
        c.noise = parse_enum<Noise>(v, "coupling.noise", parse_noise,
                                    "default, none, spin_orbit, parallel_1, parallel_2");
    }
    if (auto v = node["observable"]) {
        c.observable = as_string(v, "coupling.observable");
        if (!catalog::contains(c.observable)) {
            fail(ErrorKind::unknown_id, "coupling.observable", "unknown observable '" + c.observable + "'", &v);
        }
    }
    return c;
}

void set_numeric(ScenarioDoc &doc, const std::string &path, double value) {
    auto need_coupling = [&]() -> CouplingSpec & {
        if (!doc.coupling) {
            doc.coupling = CouplingSpec{};
        }
        return *doc.coupling;
    };
    auto set_angle = [&](Selection &s, bool theta, const std::string &field) {
        bool used = theta ? optics::uses_theta(s.state) : optics::uses_alpha(s.state);
        if (!used) {
            fail(ErrorKind::unknown_key, field,
                 "state " + std::string(optics::to_string(s.state)) + " takes no " + (theta ? "theta" : "alpha"));
        }
        (theta ? s.theta : s.alpha) = value;
    };
    if (path == "preselect.theta") return set_angle(doc.preselect, true, path);
    if (path == "preselect.alpha") return set_angle(doc.preselect, false, path);
    if (path == "postselect.theta") return set_angle(doc.postselect, true, path);
    if (path == "postselect.alpha") return set_angle(doc.postselect, false, path);
    if (path == "theta" || path == "alpha") {
        bool theta = path == "theta";
        bool any = false;
        for (Selection *s : {&doc.preselect, &doc.postselect}) {
            if (theta ? optics::uses_theta(s->state) : optics::uses_alpha(s->state)) {
                (theta ? s->theta : s->alpha) = value;
                any = true;
            }
        }
        if (!any) {
            fail(ErrorKind::unknown_key, path, "no selected state takes " + path);
        }
        return;
    }
    if (path == "coupling.g") return void(need_coupling().g = value);
    if (path == "coupling.g_prime") return void(need_coupling().g_prime = value);
    if (path == "coupling.t") return void(need_coupling().t = value);
    if (path == "coupling.kick_time") return void(need_coupling().kick_time = value);
    if (path == "meter.N") {
        if (value != std::floor(value) || value < 1 || value > 1e6) {
            fail(ErrorKind::out_of_range, path, "meter.N must be a positive integer");
        }
        doc.meter.N = static_cast<std::size_t>(value);
        return;
    }
    if (path == "meter.Delta") return void(doc.meter.Delta = value);
    fail(ErrorKind::unknown_key, path, "unknown parameter path '" + path + "'");
}

void emit_number(YAML::Emitter &out, double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    out << std::string(buf, ptr);
}

void emit_selection(YAML::Emitter &out, const Selection &s) {
    out << YAML::BeginMap;
    out << YAML::Key << "state" << YAML::Value << std::string(optics::to_string(s.state));
    if (s.theta) {
        out << YAML::Key << "theta" << YAML::Value;
        emit_number(out, *s.theta);
    }
    if (s.alpha) {
        out << YAML::Key << "alpha" << YAML::Value;
        emit_number(out, *s.alpha);
    }
    out << YAML::EndMap;
}

std::string error_text(const std::exception &e) {
    std::string kind = "error";
    if (dynamic_cast<const DegeneratePostselection *>(&e)) {
        kind = "degenerate_postselection";
    } else if (dynamic_cast<const AnnihilatedState *>(&e)) {
        kind = "annihilated_state";
    } else if (dynamic_cast<const IllConditionedFit *>(&e)) {
        kind = "ill_conditioned_fit";
    } else if (dynamic_cast<const SignatureError *>(&e)) {
        kind = "signature_error";
    } else if (dynamic_cast<const ValueError *>(&e)) {
        kind = "value_error";
    }
    return kind + ": " + e.what();
}

ResultRecord run_point(const ScenarioDoc &doc, std::vector<std::pair<std::string, double>> point,
                       const std::string &provenance) {
    ResultRecord rec;
    rec.scenario = doc.name;
    rec.point = std::move(point);
    rec.provenance = provenance;
    try {
        Ket pre = optics::prepare_state(doc.preselect.state, doc.preselect.radians());
        Ket post = optics::prepare_state(doc.postselect.state, doc.postselect.radians());
        CouplingSpec spec = doc.coupling.value_or(CouplingSpec{});
        double gpt = spec.g_prime * spec.t;
        for (const auto &id : doc.observables) {
            auto r = weak_value(pre, post, catalog::observable(id, pre.signature(), gpt));
            rec.weak_values.push_back({id, r.value});
        }
        if (doc.coupling) {
            auto meter = make_meter(doc.meter.N, doc.meter.Delta);
            auto outcome = measure(*doc.coupling, pre, post, meter);
            rec.readout = outcome.readout;
            rec.fit = outcome.fit;
        }
    } catch (const Error &e) {
        rec.weak_values.clear();
        rec.readout.reset();
        rec.fit.reset();
        rec.error = error_text(e);
    }
    return rec;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::syntax:
            return "syntax";
        case ErrorKind::unknown_key:
            return "unknown_key";
        case ErrorKind::unknown_id:
            return "unknown_id";
        case ErrorKind::out_of_range:
            return "out_of_range";
        case ErrorKind::type_mismatch:
            return "type_mismatch";
        case ErrorKind::missing_field:
            return "missing_field";
    }
    return "?";
}

namespace {

std::string decorate(ErrorKind kind, const std::string &field, const std::string &message, int line, int column) {
    std::string out(to_string(kind));
    if (line > 0) {
        out += " at line " + std::to_string(line) + ", column " + std::to_string(column);
    }
    if (!field.empty()) {
        out += " (" + field + ")";
    }
    return out + ": " + message;
}

}  // namespace

ScenarioError::ScenarioError(ErrorKind kind, std::string field, const std::string &message, int line, int column)
    : Error(decorate(kind, field, message, line, column)),
      kind_(kind),
      field_(std::move(field)),
      line_(line),
      column_(column) {
}

optics::StateParams Selection::radians() const {
    optics::StateParams p;
    if (theta) p.theta = *theta * std::numbers::pi;
    if (alpha) p.alpha = *alpha * std::numbers::pi;
    return p;
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> out;
    if (steps <= 1) {
        out.push_back(start);
        return out;
    }
    for (std::size_t i = 0; i < steps; ++i) {
        out.push_back(i + 1 == steps ? stop : start + (stop - start) * static_cast<double>(i) / (steps - 1));
    }
    return out;
}

std::vector<std::string> numeric_paths() {
    return {"theta",      "alpha",          "preselect.theta", "preselect.alpha",   "postselect.theta",
            "postselect.alpha", "coupling.g", "coupling.g_prime", "coupling.t", "coupling.kick_time",
            "meter.N",    "meter.Delta"};
}

void validate(const ScenarioDoc &doc) {
    if (doc.name.empty()) {
        fail(ErrorKind::missing_field, "name", "scenario name is empty");
    }
    auto check_sel = [](const Selection &s, const std::string &field) {
        if (optics::uses_theta(s.state)) {
            if (!s.theta) fail(ErrorKind::missing_field, field + ".theta", "missing theta");
            if (!(*s.theta > -1.0 && *s.theta < 1.0)) {
                fail(ErrorKind::out_of_range, field + ".theta", "theta must lie in (-1, 1) (units of pi)");
            }
        } else if (s.theta) {
            fail(ErrorKind::unknown_key, field + ".theta", "state takes no theta");
        }
        if (optics::uses_alpha(s.state)) {
            if (!s.alpha) fail(ErrorKind::missing_field, field + ".alpha", "missing alpha");
            if (!std::isfinite(*s.alpha)) fail(ErrorKind::out_of_range, field + ".alpha", "alpha must be finite");
        } else if (s.alpha) {
            fail(ErrorKind::unknown_key, field + ".alpha", "state takes no alpha");
        }
    };
    check_sel(doc.preselect, "preselect");
    check_sel(doc.postselect, "postselect");
    if (!(optics::state_signature(doc.preselect.state) == optics::state_signature(doc.postselect.state))) {
        fail(ErrorKind::type_mismatch, "postselect.state",
             "pre- and post-selected states live on different spaces (" +
                 optics::state_signature(doc.preselect.state).to_string() + " vs " +
                 optics::state_signature(doc.postselect.state).to_string() + ")");
    }
    auto sig = optics::state_signature(doc.preselect.state);
    for (std::size_t i = 0; i < doc.observables.size(); ++i) {
        const auto &id = doc.observables[i];
        std::string field = "observables[" + std::to_string(i) + "]";
        if (!catalog::contains(id)) {
            fail(ErrorKind::unknown_id, field, "unknown observable '" + id + "'");
        }
        auto local = catalog::local_signature(id);
        for (const auto &f : local.factors()) {
            if (!sig.contains(f.label)) {
                fail(ErrorKind::type_mismatch, field, "observable " + id + " acts on '" + f.label +
                                                          "', which the selected states lack");
            }
        }
    }
    if (doc.coupling) {
        try {
            doc.coupling->validate();
        } catch (const ValueError &e) {
            fail(ErrorKind::out_of_range, "coupling", e.what());
        }
    }
    if (doc.meter.N < 1) {
        fail(ErrorKind::out_of_range, "meter.N", "meter.N must be at least 1");
    }
    if (!(doc.meter.Delta > 0.0) || !std::isfinite(doc.meter.Delta)) {
        fail(ErrorKind::out_of_range, "meter.Delta", "meter.Delta must be positive");
    }
    std::set<std::string> seen;
    auto paths = numeric_paths();
    for (const auto &axis : doc.sweep) {
        std::string field = "sweep." + axis.path;
        if (std::find(paths.begin(), paths.end(), axis.path) == paths.end()) {
            fail(ErrorKind::unknown_key, field, "not a numeric parameter path");
        }
        if (!seen.insert(axis.path).second) {
            fail(ErrorKind::unknown_key, field, "axis listed twice");
        }
        if (axis.steps < 1) {
            fail(ErrorKind::out_of_range, field + ".steps", "steps must be at least 1");
        }
        if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) {
            fail(ErrorKind::out_of_range, field, "sweep bounds must be finite");
        }
        // The path must address something in this document.
        ScenarioDoc probe = doc;
        set_numeric(probe, axis.path, axis.start);
    }
}

ScenarioDoc parse_scenario(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception &e) {
        throw ScenarioError(ErrorKind::syntax, "", e.msg, e.mark.is_null() ? 0 : e.mark.line + 1,
                            e.mark.is_null() ? 0 : e.mark.column + 1);
    }
    if (!root.IsMap()) {
        fail(ErrorKind::syntax, "", "scenario must be a mapping at top level", &root);
    }
    check_keys(root, "", {"name", "preselect", "postselect", "observables", "coupling", "meter", "sweep"});
    ScenarioDoc doc;
    for (auto key : {"name", "preselect", "postselect"}) {
        if (!root[key]) {
            fail(ErrorKind::missing_field, key, std::string("missing ") + key, &root);
        }
    }
    doc.name = as_string(root["name"], "name");
    doc.preselect = parse_selection(root["preselect"], "preselect");
    doc.postselect = parse_selection(root["postselect"], "postselect");
    if (auto obs = root["observables"]) {
        if (!obs.IsSequence()) {
            fail(ErrorKind::type_mismatch, "observables", "expected a list", &obs);
        }
        for (std::size_t i = 0; i < obs.size(); ++i) {
            std::string field = "observables[" + std::to_string(i) + "]";
            auto item = obs[i];
            auto id = as_string(item, field);
            if (!catalog::contains(id)) {
                fail(ErrorKind::unknown_id, field, "unknown observable '" + id + "'", &item);
            }
            doc.observables.push_back(id);
        }
    }
    if (auto c = root["coupling"]) {
        doc.coupling = parse_coupling(c);
    }
    if (auto m = root["meter"]) {
        expect_map(m, "meter");
        check_keys(m, "meter", {"N", "Delta"});
        if (auto n = m["N"]) doc.meter.N = as_count(n, "meter.N");
        if (auto d = m["Delta"]) doc.meter.Delta = as_double(d, "meter.Delta");
    }
    if (auto sw = root["sweep"]) {
        expect_map(sw, "sweep");
        for (const auto &kv : sw) {
            SweepAxis axis;
            axis.path = kv.first.as<std::string>();
            std::string field = "sweep." + axis.path;
            const auto &spec = kv.second;
            expect_map(spec, field);
            check_keys(spec, field, {"start", "stop", "steps"});
            for (auto key : {"start", "stop", "steps"}) {
                if (!spec[key]) {
                    fail(ErrorKind::missing_field, field + "." + key, std::string("missing ") + key, &spec);
                }
            }
            axis.start = as_double(spec["start"], field + ".start");
            axis.stop = as_double(spec["stop"], field + ".stop");
            axis.steps = as_count(spec["steps"], field + ".steps");
            doc.sweep.push_back(axis);
        }
    }
    try {
        validate(doc);
    } catch (const ScenarioError &e) {
        if (e.line() > 0) {
            throw;
        }
        // Attach the location of the offending field when it is a plain dotted path.
        YAML::Node at = root;
        std::string field = e.field();
        std::size_t pos = 0;
        bool found = !field.empty() && field.find('[') == std::string::npos;
        while (found && pos != std::string::npos) {
            auto next = field.find('.', pos);
            auto key = field.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            if (!at.IsMap() || !at[key]) {
                found = false;
                break;
            }
            at = at[key];
            pos = next == std::string::npos ? next : next + 1;
        }
        if (found) {
            throw ScenarioError(e.kind(), e.field(), std::string(e.what()).substr(std::string(e.what()).find(": ") + 2),
                                at.Mark().line + 1, at.Mark().column + 1);
        }
        throw;
    }
    return doc;
}

std::string print_scenario(const ScenarioDoc &doc) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << doc.name;
    out << YAML::Key << "preselect" << YAML::Value << YAML::Flow;
    emit_selection(out, doc.preselect);
    out << YAML::Key << "postselect" << YAML::Value << YAML::Flow;
    emit_selection(out, doc.postselect);
    out << YAML::Key << "observables" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto &o : doc.observables) {
        out << o;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "coupling" << YAML::Value << YAML::BeginMap;
    if (!doc.coupling) {
        out << YAML::Key << "variant" << YAML::Value << "none";
    } else {
        const auto &c = *doc.coupling;
        out << YAML::Key << "variant" << YAML::Value << std::string(to_string(c.variant));
        out << YAML::Key << "g" << YAML::Value;
        emit_number(out, c.g);
        out << YAML::Key << "g_prime" << YAML::Value;
        emit_number(out, c.g_prime);
        out << YAML::Key << "t" << YAML::Value;
        emit_number(out, c.t);
        out << YAML::Key << "kick_time" << YAML::Value;
        emit_number(out, c.kick_time);
        out << YAML::Key << "sign" << YAML::Value << std::string(to_string(c.sign));
        out << YAML::Key << "noise" << YAML::Value << std::string(to_string(c.noise));
        out << YAML::Key << "observable" << YAML::Value << c.observable;
    }
    out << YAML::EndMap;
    out << YAML::Key << "meter" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "N" << YAML::Value << doc.meter.N;
    out << YAML::Key << "Delta" << YAML::Value;
    emit_number(out, doc.meter.Delta);
    out << YAML::EndMap;
    if (!doc.sweep.empty()) {
        out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        for (const auto &axis : doc.sweep) {
            out << YAML::Key << axis.path << YAML::Value << YAML::Flow << YAML::BeginMap;
            out << YAML::Key << "start" << YAML::Value;
            emit_number(out, axis.start);
            out << YAML::Key << "stop" << YAML::Value;
            emit_number(out, axis.stop);
            out << YAML::Key << "steps" << YAML::Value << axis.steps;
            out << YAML::EndMap;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void apply_override(ScenarioDoc &doc, std::string_view path_view, std::string_view value) {
    std::string path(path_view);
    std::string text(value);
    auto enum_value = [&](auto parsed, const std::string &what) {
        if (!parsed) {
            fail(ErrorKind::unknown_id, path, "unknown " + what + " '" + text + "'");
        }
        return *parsed;
    };
    if (path == "name") {
        doc.name = text;
    } else if (path == "preselect.state" || path == "postselect.state") {
        Selection &s = path == "preselect.state" ? doc.preselect : doc.postselect;
        s.state = state_id(text, path, nullptr);
        if (!optics::uses_theta(s.state)) s.theta.reset();
        if (!optics::uses_alpha(s.state)) s.alpha.reset();
        fill_defaults(s);
    } else if (path == "coupling.variant") {
        if (text == "none") {
            doc.coupling.reset();
        } else {
            auto v = enum_value(parse_variant(text), "variant");
            if (!doc.coupling) doc.coupling = CouplingSpec{};
            doc.coupling->variant = v;
        }
    } else if (path == "coupling.sign" || path == "coupling.noise" || path == "coupling.observable") {
        if (!doc.coupling) doc.coupling = CouplingSpec{};
        if (path == "coupling.sign") {
            doc.coupling->sign = enum_value(parse_sign(text), "sign");
        } else if (path == "coupling.noise") {
            doc.coupling->noise = enum_value(parse_noise(text), "noise");
        } else {
            if (!catalog::contains(text)) fail(ErrorKind::unknown_id, path, "unknown observable '" + text + "'");
            doc.coupling->observable = text;
        }
    } else {
        auto paths = numeric_paths();
        if (std::find(paths.begin(), paths.end(), path) == paths.end()) {
            fail(ErrorKind::unknown_key, path, "unknown parameter path '" + path + "'");
        }
        auto v = to_double(text);
        if (!v) {
            fail(ErrorKind::type_mismatch, path, "expected a finite number, got '" + text + "'");
        }
        set_numeric(doc, path, *v);
    }
    validate(doc);
}

void apply_override(ScenarioDoc &doc, std::string_view assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        fail(ErrorKind::syntax, std::string(assignment), "override must have the form path=value");
    }
    apply_override(doc, assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::optional<std::string_view> find_bundle(std::string_view name) {
    for (const auto &b : bundles()) {
        if (b.name == name) {
            return b.text;
        }
    }
    return std::nullopt;
}

std::vector<ResultRecord> run_scenario(const ScenarioDoc &doc, unsigned threads) {
    validate(doc);
    std::string provenance = provenance_hash(doc);

    // Cartesian product, first axis slowest.
    std::vector<std::vector<std::pair<std::string, double>>> points(1);
    for (const auto &axis : doc.sweep) {
        std::vector<std::vector<std::pair<std::string, double>>> next;
        for (const auto &p : points) {
            for (double v : axis.values()) {
                auto q = p;
                q.emplace_back(axis.path, v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }

    std::vector<ResultRecord> records(points.size());
    auto work = [&](std::size_t i) {
        ScenarioDoc local = doc;
        local.sweep.clear();
        try {
            for (const auto &[path, v] : points[i]) {
                set_numeric(local, path, v);
            }
            validate(local);
        } catch (const ScenarioError &e) {
            records[i].scenario = doc.name;
            records[i].point = points[i];
            records[i].provenance = provenance;
            records[i].error = std::string("value_error: ") + e.what();
            return;
        }
        records[i] = run_point(local, points[i], provenance);
    };

    unsigned n = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, points.size()));
    if (n <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            work(i);
        }
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < points.size(); i = next++) {
                work(i);
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    return records;
}

}  // namespace cheshire::scenario
