#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bhdimer/errors.hpp"
#include "bhdimer/semiclassical.hpp"
#include "bhdimer/units.hpp"

namespace bhd::cli {

namespace {

const json kEmpty = json::object();

double ghz(double v) { return units::ghz_to_rad(v); }
double mhz(double v) { return units::mhz_to_rad(v); }
double khz(double v) { return units::hz_to_rad(1e3 * v); }

}  // namespace

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

Section::Section(const json* src, json* resolved, std::string path)
    : src_(src ? src : &kEmpty), dst_(resolved), path_(std::move(path)) {
    if (!src_->is_object()) throw ConfigError("'" + path_ + "' must be a JSON object");
    if (!dst_->is_object()) *dst_ = json::object();
}

bool Section::has(const std::string& key) const { return src_->contains(key); }

const json* Section::find(const std::string& key) {
    used_.insert(key);
    const auto it = src_->find(key);
    return it == src_->end() ? nullptr : &*it;
}

double Section::number(const std::string& key, std::optional<double> fallback) {
    const json* j = find(key);
    double v;
    if (j) {
        if (!j->is_number()) throw ConfigError("'" + path_ + "." + key + "' must be a number");
        v = j->get<double>();
    } else if (fallback) {
        v = *fallback;
    } else {
        throw ConfigError("missing required key '" + path_ + "." + key + "'");
    }
    (*dst_)[key] = v;
    return v;
}

int Section::integer(const std::string& key, std::optional<int> fallback) {
    const json* j = find(key);
    int v;
    if (j) {
        if (!j->is_number_integer()) throw ConfigError("'" + path_ + "." + key + "' must be an integer");
        v = j->get<int>();
    } else if (fallback) {
        v = *fallback;
    } else {
        throw ConfigError("missing required key '" + path_ + "." + key + "'");
    }
    (*dst_)[key] = v;
    return v;
}

bool Section::boolean(const std::string& key, bool fallback) {
    const json* j = find(key);
    bool v = fallback;
    if (j) {
        if (!j->is_boolean()) throw ConfigError("'" + path_ + "." + key + "' must be true or false");
        v = j->get<bool>();
    }
    (*dst_)[key] = v;
    return v;
}

std::string Section::string(const std::string& key, std::optional<std::string> fallback) {
    const json* j = find(key);
    std::string v;
    if (j) {
        if (!j->is_string()) throw ConfigError("'" + path_ + "." + key + "' must be a string");
        v = j->get<std::string>();
    } else if (fallback) {
        v = *fallback;
    } else {
        throw ConfigError("missing required key '" + path_ + "." + key + "'");
    }
    (*dst_)[key] = v;
    return v;
}

std::vector<double> Section::numbers(const std::string& key, std::optional<std::vector<double>> fallback) {
    const json* j = find(key);
    std::vector<double> v;
    if (j) {
        if (!j->is_array()) throw ConfigError("'" + path_ + "." + key + "' must be an array of numbers");
        for (const auto& e : *j) {
            if (!e.is_number()) throw ConfigError("'" + path_ + "." + key + "' must be an array of numbers");
            v.push_back(e.get<double>());
        }
    } else if (fallback) {
        v = *fallback;
    } else {
        throw ConfigError("missing required key '" + path_ + "." + key + "'");
    }
    (*dst_)[key] = v;
    return v;
}

Section Section::sub(const std::string& key) {
    const json* j = find(key);
    (*dst_)[key] = json::object();
    return Section(j, &(*dst_)[key], path_ + "." + key);
}

std::vector<double> Section::grid(const std::string& key, double from, double to, int points) {
    Section g = sub(key);
    const double a = g.number("from", from), b = g.number("to", to);
    const int n = g.integer("points", points);
    g.finish();
    if (n < 1) throw ConfigError("'" + g.path() + ".points' must be at least 1");
    return linspace(a, b, n);
}

void Section::finish() const {
    for (const auto& [key, value] : src_->items())
        if (!used_.count(key)) throw ConfigError("unknown key '" + path_ + "." + key + "'");
}

DimerParams read_dimer(Section s) {
    DimerParams p;
    p.omega_L = ghz(s.number("omega_L_GHz", 7.0));
    p.omega_R = ghz(s.number("omega_R_GHz", 7.2));
    p.kappa = ghz(s.number("kappa_GHz", 0.29));
    p.kappa_R = ghz(s.number("kappa_R_GHz", 0.0));
    p.kappa_int_L = ghz(s.number("kappa_int_L_GHz", 0.0));
    p.kappa_int_R = ghz(s.number("kappa_int_R_GHz", 0.0));
    p.J = ghz(s.number("J_GHz", 0.25));
    p.U_L = khz(s.number("U_L_kHz", -80.0));
    p.U_R = khz(s.number("U_R_kHz", -80.0));
    s.finish();
    p.validate();
    return p;
}

json dimer_json(const DimerParams& p) {
    return {{"omega_L_GHz", units::rad_to_ghz(p.omega_L)}, {"omega_R_GHz", units::rad_to_ghz(p.omega_R)},
            {"kappa_GHz", units::rad_to_ghz(p.kappa)},     {"kappa_R_GHz", units::rad_to_ghz(p.kappa_R)},
            {"kappa_int_L_GHz", units::rad_to_ghz(p.kappa_int_L)},
            {"kappa_int_R_GHz", units::rad_to_ghz(p.kappa_int_R)},
            {"J_GHz", units::rad_to_ghz(p.J)},             {"U_L_kHz", units::rad_to_hz(p.U_L) * 1e-3},
            {"U_R_kHz", units::rad_to_hz(p.U_R) * 1e-3}};
}

namespace {

double read_pump_frequency(Section& s, const DimerParams& p, double default_delta_MHz) {
    if (s.has("delta_MHz") && s.has("pump_GHz"))
        throw ConfigError("'" + s.path() + "': give either delta_MHz or pump_GHz, not both");
    if (s.has("pump_GHz")) return ghz(s.number("pump_GHz"));
    return pump_from_detuning(p, mhz(s.number("delta_MHz", default_delta_MHz)));
}

double read_flux(Section& s, double omega_p, double default_flux) {
    if (s.has("power_dBm") && s.has("flux_phps"))
        throw ConfigError("'" + s.path() + "': give either power_dBm or flux_phps, not both");
    if (s.has("power_dBm")) return units::dbm_to_flux(s.number("power_dBm"), omega_p);
    return s.number("flux_phps", default_flux);
}

}  // namespace

Drive read_drive(Section s, const DimerParams& p, double default_delta_MHz, double default_flux) {
    const double wp = read_pump_frequency(s, p, default_delta_MHz);
    const double flux = read_flux(s, wp, default_flux);
    const double phase = s.number("phase_rad", 0.0);
    s.finish();
    if (!(flux >= 0.0) || !std::isfinite(flux)) throw ConfigError("'" + s.path() + "': flux must be non-negative");
    return Drive::from_flux(wp, flux, phase);
}

Pump read_pump(Section s, const DimerParams& p, double default_delta_MHz, double default_gain_dB) {
    Pump out;
    const bool explicit_drive = s.has("power_dBm") || s.has("flux_phps");
    if (!explicit_drive) {
        const double delta = mhz(s.number("delta_MHz", default_delta_MHz));
        const double G = units::from_db(s.number("gain_dB", default_gain_dB));
        s.finish();
        double U = std::max(std::abs(p.U_L), std::abs(p.U_R));
        if (U == 0.0) throw InvalidParams("a target gain needs a non-zero Kerr shift");
        const auto op = operating_point_for_gain(p, delta, G, 6.0 * p.kappa * p.kappa / U, 3.0 * p.kappa);
        out.drive = op.drive;
        out.state = op.state;
        out.peak = op.peak;
        return out;
    }
    const double wp = read_pump_frequency(s, p, default_delta_MHz);
    const double flux = read_flux(s, wp, 0.0);
    const double phase = s.number("phase_rad", 0.0);
    const std::string branch = s.string("branch", "lower");
    s.finish();
    if (branch != "lower" && branch != "upper") throw ConfigError("'" + s.path() + ".branch' must be lower or upper");
    out.drive = Drive::from_flux(wp, flux, phase);
    std::vector<SteadyState> stable;
    for (auto& st : solve_steady_states(p, out.drive))
        if (st.stable) stable.push_back(st);
    if (stable.empty()) throw PreconditionViolation("no stable steady state at this drive");
    auto by_occupation = [](const SteadyState& a, const SteadyState& b) { return a.n_L + a.n_R < b.n_L + b.n_R; };
    out.state = branch == "lower" ? *std::min_element(stable.begin(), stable.end(), by_occupation)
                                  : *std::max_element(stable.begin(), stable.end(), by_occupation);
    return out;
}

json steady_state_json(const SteadyState& s) {
    json eig = json::array();
    for (const auto& l : s.eigenvalues) eig.push_back({units::rad_to_mhz(l.real()), units::rad_to_mhz(l.imag())});
    return {{"alpha_L", {s.alpha_L.real(), s.alpha_L.imag()}},
            {"alpha_R", {s.alpha_R.real(), s.alpha_R.imag()}},
            {"n_L", s.n_L},
            {"n_R", s.n_R},
            {"stable", s.stable},
            {"marginal", s.marginal},
            {"eigenvalues_MHz", eig}};
}

json pump_json(const Pump& pump, const DimerParams& p) {
    json j = {{"pump_GHz", units::rad_to_ghz(pump.drive.omega_p)},
              {"delta_MHz", units::rad_to_mhz(drive_detuning(p, pump.drive.omega_p))},
              {"flux_phps", pump.drive.flux()},
              {"power_dBm", units::flux_to_dbm(pump.drive.flux(), pump.drive.omega_p)},
              {"steady_state", steady_state_json(pump.state)}};
    if (pump.peak) {
        j["peak_Delta_MHz"] = units::rad_to_mhz(pump.peak->Delta);
        j["peak_gain_dB"] = units::to_db(pump.peak->gain);
    }
    return j;
}

CircuitParams read_circuit(Section s) {
    CircuitParams c;
    c.C_L = 1e-12 * s.number("C_L_pF");
    c.C_R = 1e-12 * s.number("C_R_pF");
    c.C_J = 1e-12 * s.number("C_J_pF");
    c.C_kappa = 1e-12 * s.number("C_kappa_pF");
    c.M = s.integer("M");
    c.E_J1 = units::kPlanck * 1e9 * s.number("E_J1_GHz");
    c.E_J2 = units::kPlanck * 1e9 * s.number("E_J2_GHz");
    c.Z0 = s.number("Z0_ohm", 50.0);
    c.phi_ext = s.number("phi_ext", 0.0);
    s.finish();
    c.validate();
    return c;
}

DesignTargets read_design(Section s) {
    DesignTargets t;
    t.omega_L = ghz(s.number("omega_L_GHz", 7.0));
    t.omega_R = ghz(s.number("omega_R_GHz", 7.2));
    t.U_R = khz(s.number("U_R_kHz", -80.0));
    t.J = ghz(s.number("J_GHz", 0.25));
    t.kappa = ghz(s.number("kappa_GHz", 0.29));
    t.M = s.integer("M", 10);
    t.asymmetry = s.number("asymmetry", 0.5);
    t.Z0 = s.number("Z0_ohm", 50.0);
    s.finish();
    return t;
}

json circuit_json(const CircuitParams& c) {
    return {{"C_L_pF", c.C_L * 1e12},        {"C_R_pF", c.C_R * 1e12},
            {"C_J_pF", c.C_J * 1e12},        {"C_kappa_pF", c.C_kappa * 1e12},
            {"M", c.M},                      {"E_J1_GHz", c.E_J1 / units::kPlanck * 1e-9},
            {"E_J2_GHz", c.E_J2 / units::kPlanck * 1e-9}, {"Z0_ohm", c.Z0},
            {"phi_ext", c.phi_ext},          {"asymmetry", c.asymmetry()}};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) f << (i ? "," : "") << cells[i];
        f << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.push_back(cell);
    }
    return out;
}

Table read_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    Table t;
    std::string line;
    if (!std::getline(f, line)) throw InvalidParams(path + " is empty");
    t.header = split(line);
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size())
            throw InvalidParams(path + ":" + std::to_string(lineno) + ": expected " +
                                std::to_string(t.header.size()) + " columns");
        std::vector<double> row;
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != c.size() || c.empty())
                throw InvalidParams(path + ":" + std::to_string(lineno) + ": '" + c + "' is not a number");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace

ReflectionTrace read_trace_csv(const std::string& path) {
    const Table t = read_table(path);
    const int f = t.column("freq_Hz"), ph = t.column("phase_rad"), re = t.column("re_gamma"),
              im = t.column("im_gamma");
    if (f < 0 || (ph < 0 && (re < 0 || im < 0)))
        throw InvalidParams(path + ": expected columns freq_Hz and phase_rad, or freq_Hz, re_gamma, im_gamma");
    ReflectionTrace tr;
    for (const auto& r : t.rows) {
        tr.omega.push_back(units::hz_to_rad(r[f]));
        tr.phase.push_back(ph >= 0 ? r[ph] : std::atan2(r[im], r[re]));
    }
    tr.validate();
    return tr;
}

QuadratureSamples read_samples_csv(const std::string& path) {
    const Table t = read_table(path);
    const int c[4] = {t.column("re_zp"), t.column("im_zp"), t.column("re_zm"), t.column("im_zm")};
    if (*std::min_element(c, c + 4) < 0) throw InvalidParams(path + ": expected columns re_zp, im_zp, re_zm, im_zm");
    QuadratureSamples s;
    for (const auto& r : t.rows) {
        s.z_plus.emplace_back(r[c[0]], r[c[1]]);
        s.z_minus.emplace_back(r[c[2]], r[c[3]]);
    }
    return s;
}

void write_samples_csv(const std::string& path, const QuadratureSamples& s) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        rows.push_back({fmt(s.z_plus[i].real()), fmt(s.z_plus[i].imag()), fmt(s.z_minus[i].real()),
                        fmt(s.z_minus[i].imag())});
    write_csv(path, {"re_zp", "im_zp", "re_zm", "im_zm"}, rows);
}

}  // namespace bhd::cli
