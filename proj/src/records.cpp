#include <charconv>
#include <cmath>
#include <cstdio>

#include "cheshire/scenario.hpp"

namespace cheshire::scenario {

namespace {

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string json_string(const std::string &s) {
    std::string out = "\"";
    for (unsigned char c : s) {
        switch (c) {
            case '"':
                out += "\\\"";
                break;
            case '\\':
                out += "\\\\";
                break;
            case '\n':
                out += "\\n";
                break;
            case '\t':
                out += "\\t";
                break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out + "\"";
}

std::string json_number(double x) {
    return std::isfinite(x) ? format_number(x) : "null";
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::string provenance_hash(const ScenarioDoc &doc) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : print_scenario(doc)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string to_csv(const std::vector<ResultRecord> &records) {
    std::string out = "scenario";
    if (!records.empty()) {
        for (const auto &[path, v] : records.front().point) {
            out += "," + csv_field(path);
        }
    }
    out += ",observable,wv_re,wv_im,mean_q,mean_p,success_prob,fit_re,fit_im,residual,error\n";
    for (const auto &r : records) {
        std::string head = csv_field(r.scenario);
        for (const auto &[path, v] : r.point) {
            head += "," + format_number(v);
        }
        std::string tail;
        if (r.readout) {
            tail += format_number(r.readout->mean_q) + "," + format_number(r.readout->mean_p) + "," +
                    format_number(r.readout->success_probability);
        } else {
            tail += ",,";
        }
        if (r.fit) {
            tail += "," + format_number(r.fit->A_fit.real()) + "," + format_number(r.fit->A_fit.imag()) + "," +
                    format_number(r.fit->residual);
        } else {
            tail += ",,,";
        }
        tail += "," + csv_field(r.error);
        if (r.weak_values.empty()) {
            out += head + ",,,," + tail + "\n";
            continue;
        }
        for (const auto &w : r.weak_values) {
            out += head + "," + csv_field(w.id) + "," + format_number(w.value.real()) + "," +
                   format_number(w.value.imag()) + "," + tail + "\n";
        }
    }
    return out;
}

std::string to_jsonl(const std::vector<ResultRecord> &records) {
    std::string out;
    for (const auto &r : records) {
        out += "{\"scenario\":" + json_string(r.scenario) + ",\"point\":{";
        for (std::size_t i = 0; i < r.point.size(); ++i) {
            out += (i ? "," : "") + json_string(r.point[i].first) + ":" + json_number(r.point[i].second);
        }
        out += "},\"weak_values\":[";
        for (std::size_t i = 0; i < r.weak_values.size(); ++i) {
            const auto &w = r.weak_values[i];
            out += std::string(i ? "," : "") + "{\"observable\":" + json_string(w.id) +
                   ",\"re\":" + json_number(w.value.real()) + ",\"im\":" + json_number(w.value.imag()) + "}";
        }
        out += "],\"readout\":";
        if (r.readout) {
            const auto &m = *r.readout;
            out += "{\"mean_q\":" + json_number(m.mean_q) + ",\"mean_p\":" + json_number(m.mean_p) +
                   ",\"var_q\":" + json_number(m.var_q) + ",\"var_p\":" + json_number(m.var_p) +
                   ",\"success_prob\":" + json_number(m.success_probability) + "}";
        } else {
            out += "null";
        }
        out += ",\"fit\":";
        if (r.fit) {
            const auto &f = *r.fit;
            out += "{\"re\":" + json_number(f.A_fit.real()) + ",\"im\":" + json_number(f.A_fit.imag()) +
                   ",\"a_re\":" + json_number(f.a_fit.real()) + ",\"a_im\":" + json_number(f.a_fit.imag()) +
                   ",\"residual\":" + json_number(f.residual) + ",\"accepted\":" + (f.accepted ? "true" : "false") +
                   "}";
        } else {
            out += "null";
        }
        out += ",\"provenance\":" + json_string(r.provenance) + ",\"error\":";
        out += r.error.empty() ? "null" : json_string(r.error);
        out += "}\n";
    }
    return out;
}

}  // namespace cheshire::scenario
