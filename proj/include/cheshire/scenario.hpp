#pragma once

// Declarative scenario files.
//
//   name: disembodiment
//   preselect:  {state: disembody_in, theta: 0.5}      # angles in units of pi
//   postselect: {state: disembody_f, alpha: 0.25}
//   observables: [sigma_z_L, sigma_z_R, LxSx_L, LxSx_R]
//   coupling:
//     variant: measure_sigma_zR_noisy                  # or none
//     g: 0.001
//     g_prime: 0.001
//     t: 1
//     kick_time: 0
//     sign: consistent
//     noise: default
//     observable: sigma_z                              # noiseless_kick only
//   meter: {N: 64, Delta: 4}
//   sweep:
//     preselect.theta: {start: 0.1, stop: 0.9, steps: 9}
//
// Unknown keys are errors. Sweep grids include both endpoints.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cheshire/dynamics.hpp"
#include "cheshire/errors.hpp"
#include "cheshire/meter.hpp"
#include "cheshire/optics.hpp"

namespace cheshire::scenario {

enum class ErrorKind { syntax, unknown_key, unknown_id, out_of_range, type_mismatch, missing_field };

std::string_view to_string(ErrorKind kind);

class ScenarioError : public Error {
   public:
    /// line and column are 1-based; 0 when unknown.
    ScenarioError(ErrorKind kind, std::string field, const std::string &message, int line = 0, int column = 0);

    ErrorKind kind() const noexcept {
        return kind_;
    }
    const std::string &field() const noexcept {
        return field_;
    }
    int line() const noexcept {
        return line_;
    }
    int column() const noexcept {
        return column_;
    }

   private:
    ErrorKind kind_;
    std::string field_;
    int line_;
    int column_;
};

/// A selected state with its angles in units of pi.
struct Selection {
    optics::StateId state = optics::StateId::cheshire_in;
    std::optional<double> theta;
    std::optional<double> alpha;

    optics::StateParams radians() const;
    bool operator==(const Selection &) const = default;
};

struct MeterSpec {
    std::size_t N = 64;
    double Delta = 4.0;

    bool operator==(const MeterSpec &) const = default;
};

struct SweepAxis {
    std::string path;
    double start = 0.0;
    double stop = 0.0;
    std::size_t steps = 1;

    /// Inclusive grid: start, ..., stop.
    std::vector<double> values() const;
    bool operator==(const SweepAxis &) const = default;
};

struct ScenarioDoc {
    std::string name;
    Selection preselect;
    Selection postselect;
    std::vector<std::string> observables;
    /// Absent when the scenario only evaluates weak values.
    std::optional<CouplingSpec> coupling;
    MeterSpec meter;
    std::vector<SweepAxis> sweep;

    bool operator==(const ScenarioDoc &) const = default;
};

/// Parses and validates; fills defaults (N = 64, Delta = 4, g = g' = 1e-3, t = 1, kick_time = 0,
/// theta = 0.5, alpha = 0.25 for states that take them).
ScenarioDoc parse_scenario(std::string_view text);

/// Canonical YAML text; parse_scenario(print_scenario(doc)) == doc.
std::string print_scenario(const ScenarioDoc &doc);

/// Checks ids, ranges and sweep paths. Throws ScenarioError.
void validate(const ScenarioDoc &doc);

/// Numeric paths accepted by overrides and sweeps.
std::vector<std::string> numeric_paths();

/// Applies `path=value`. Dotted paths address the document (coupling.g, meter.N, preselect.theta);
/// the bare names theta and alpha set every selection that takes that angle. Throws ScenarioError.
void apply_override(ScenarioDoc &doc, std::string_view path, std::string_view value);
void apply_override(ScenarioDoc &doc, std::string_view assignment);

struct Bundle {
    std::string_view name;
    std::string_view text;
};

/// Scenario files shipped with the library.
const std::vector<Bundle> &bundles();
std::optional<std::string_view> find_bundle(std::string_view name);

struct ObservableValue {
    std::string id;
    cplx value;
};

struct ResultRecord {
    std::string scenario;
    std::vector<std::pair<std::string, double>> point;
    std::vector<ObservableValue> weak_values;
    std::optional<MeterReadout> readout;
    std::optional<EffectiveWeakValueFit> fit;
    std::string provenance;
    /// Empty on success, otherwise "<kind>: <message>".
    std::string error;
};

/// FNV-1a 64-bit hash of the canonical document text, as 16 hex digits.
std::string provenance_hash(const ScenarioDoc &doc);

/// One record per sweep point in sweep order (first axis slowest). Points run in parallel;
/// computation errors land in the record's error field.
std::vector<ResultRecord> run_scenario(const ScenarioDoc &doc, unsigned threads = 0);

/// 17 significant digits, '.' decimal separator, no locale dependence.
std::string format_number(double x);

/// CSV with header scenario, <sweep paths...>, observable, wv_re, wv_im, mean_q, mean_p,
/// success_prob, fit_re, fit_im, residual, error. One row per observable.
std::string to_csv(const std::vector<ResultRecord> &records);
/// One JSON object per line.
std::string to_jsonl(const std::vector<ResultRecord> &records);

}  // namespace cheshire::scenario
