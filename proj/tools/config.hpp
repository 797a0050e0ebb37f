#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhdimer/circuit.hpp"
#include "bhdimer/core_model.hpp"
#include "bhdimer/fluctuations.hpp"
#include "bhdimer/reflection.hpp"
#include "bhdimer/cumulants.hpp"

namespace bhd::cli {

using json = nlohmann::json;

// Malformed configuration: unknown keys, wrong types, conflicting alternatives.
// Reported as a usage error.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Strict reader over one JSON object. Every value read (or defaulted) is
// echoed into `resolved`; finish() rejects keys that were never read.
class Section {
public:
    Section(const json* src, json* resolved, std::string path);

    bool has(const std::string& key) const;
    double number(const std::string& key, std::optional<double> fallback = std::nullopt);
    int integer(const std::string& key, std::optional<int> fallback = std::nullopt);
    bool boolean(const std::string& key, bool fallback);
    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt);
    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt);
    Section sub(const std::string& key);
    // {"from": a, "to": b, "points": n} -> n evenly spaced values (unit of the key).
    std::vector<double> grid(const std::string& key, double from, double to, int points);
    void finish() const;
    // Overwrites the echoed value of a key (command-line overrides).
    void record(const std::string& key, json value) { (*dst_)[key] = std::move(value); }

    const std::string& path() const { return path_; }

private:
    const json* src_;
    json* dst_;
    std::string path_;
    std::set<std::string> used_;

    const json* find(const std::string& key);
};

std::vector<double> linspace(double a, double b, int n);

// Dimer block in GHz (rates over 2 pi) and kHz for the Kerr shifts; defaults
// describe the reference device.
DimerParams read_dimer(Section s);
json dimer_json(const DimerParams& p);

// Drive: one of delta_MHz / pump_GHz and one of power_dBm / flux_phps.
Drive read_drive(Section s, const DimerParams& p, double default_delta_MHz, double default_flux);

struct Pump {
    Drive drive;
    SteadyState state;
    std::optional<GainPeak> peak;
};

// Either {"delta_MHz", "gain_dB"} (continuation to the target peak gain) or an
// explicit drive with an optional "branch": "lower" | "upper".
Pump read_pump(Section s, const DimerParams& p, double default_delta_MHz, double default_gain_dB);
json pump_json(const Pump& pump, const DimerParams& p);
json steady_state_json(const SteadyState& s);

CircuitParams read_circuit(Section s);
DesignTargets read_design(Section s);
json circuit_json(const CircuitParams& c);

// CSV helpers. Numbers are printed with 12 significant digits.
std::string fmt(double v);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
ReflectionTrace read_trace_csv(const std::string& path);
QuadratureSamples read_samples_csv(const std::string& path);
void write_samples_csv(const std::string& path, const QuadratureSamples& s);

}  // namespace bhd::cli
