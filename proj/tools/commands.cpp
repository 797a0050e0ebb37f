#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "bhdimer/errors.hpp"
#include "bhdimer/fock_oracle.hpp"
#include "bhdimer/semiclassical.hpp"
#include "bhdimer/units.hpp"

#ifndef BHD_DATA_DIR
#define BHD_DATA_DIR "data"
#endif

namespace bhd::cli {

namespace {

constexpr double kPi = std::numbers::pi;
using units::ghz_to_rad;
using units::mhz_to_rad;
using units::rad_to_hz;

// Reference device, rates over 2 pi.
constexpr double kKappaGHz = 0.29;
constexpr double kNondegenerateDeltaMHz = -0.6 * kKappaGHz * 1e3;
constexpr double kDegenerateDeltaMHz = 0.3 * kKappaGHz * 1e3;

std::vector<double> scaled(const std::vector<double>& v, double factor) {
    std::vector<double> out;
    for (double x : v) out.push_back(x * factor);
    return out;
}

unsigned long long read_seed(Section& root, const Context& ctx) {
    const int s = root.integer("seed", 1);
    if (s < 0) throw ConfigError("'seed' must be non-negative");
    if (ctx.seed) {
        root.record("seed", *ctx.seed);
        return *ctx.seed;
    }
    return static_cast<unsigned long long>(s);
}

json fit_json(const LorentzianFit& f) {
    return {{"center_Hz", rad_to_hz(f.center)},
            {"fwhm_Hz", rad_to_hz(f.fwhm)},
            {"peak", f.peak},
            {"baseline", f.baseline},
            {"rms_residual", f.residual}};
}

// ---- steady-state ---------------------------------------------------------

void cmd_steady_state(Section& root, Context& ctx) {
    const DimerParams p = read_dimer(root.sub("dimer"));
    const Drive d = read_drive(root.sub("drive"), p, kNondegenerateDeltaMHz, 2e9);
    root.finish();
    const PhasePoint pt = classify_phase(p, d);
    json sols = json::array();
    for (const auto& s : pt.solutions) {
        json j = steady_state_json(s);
        if (s.stable) {
            const auto [lo, hi] = shifted_eigenfrequencies(s, d.omega_p);
            j["shifted_frequencies_GHz"] = {units::rad_to_ghz(lo), units::rad_to_ghz(hi)};
        }
        sols.push_back(j);
    }
    write_json(ctx.file("steady_state", ".json"),
               {{"pump_GHz", units::rad_to_ghz(d.omega_p)},
                {"delta_MHz", units::rad_to_mhz(pt.delta)},
                {"flux_phps", d.flux()},
                {"power_dBm", units::flux_to_dbm(d.flux(), d.omega_p)},
                {"region", to_string(pt.region)},
                {"ambiguous", pt.ambiguous},
                {"marginal", pt.marginal},
                {"solutions", sols}});
}

// ---- phase-diagram --------------------------------------------------------

void write_phase_diagram(const PhaseDiagram& pd, Context& ctx) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < pd.deltas.size(); ++i)
        for (std::size_t j = 0; j < pd.fluxes.size(); ++j) {
            const auto& pt = pd.points[i * pd.fluxes.size() + j];
            rows.push_back({fmt(rad_to_hz(pt.delta)), fmt(pt.flux), std::to_string(pt.solutions.size()),
                            std::to_string(pt.n_stable), pt.error ? "error" : to_string(pt.region)});
        }
    write_csv(ctx.file("phase_diagram", ".csv"), {"delta_Hz", "flux_phps", "n_solutions", "n_stable", "region"},
              rows);
    const auto c = pd.region_counts();
    std::size_t errors = 0;
    for (const auto& pt : pd.points) errors += pt.error.has_value();
    write_json(ctx.file("phase_diagram", ".json"),
               {{"counts", {{"S", c[0]}, {"M", c[1]}, {"P", c[2]}, {"error", errors}}},
                {"delta_points", pd.deltas.size()},
                {"flux_points", pd.fluxes.size()}});
}

void cmd_phase_diagram(Section& root, Context& ctx) {
    const DimerParams p = read_dimer(root.sub("dimer"));
    const auto deltas = scaled(root.grid("delta_MHz", -580.0, 435.0, 101), mhz_to_rad(1.0));
    const auto fluxes = root.grid("flux_phps", 0.0, 2e12, 101);
    root.finish();
    write_phase_diagram(phase_diagram(p, deltas, fluxes, ctx.threads), ctx);
}

// ---- gain -----------------------------------------------------------------

void cmd_gain(Section& root, Context& ctx) {
    const DimerParams p = read_dimer(root.sub("dimer"));
    const Pump pump = read_pump(root.sub("pump"), p, kNondegenerateDeltaMHz, 20.0);
    const auto grid = scaled(root.grid("Delta_MHz", -600.0, 600.0, 601), mhz_to_rad(1.0));
    root.finish();
    const GainSpectrum g = gain_spectrum(pump.state, p, grid);
    std::vector<std::vector<std::string>> rows;
    for (const auto& pt : g.points)
        rows.push_back({fmt(rad_to_hz(pt.Delta)), fmt(pt.signal), fmt(units::to_db(pt.signal)), fmt(pt.idler),
                        fmt(units::to_db(pt.idler))});
    write_csv(ctx.file("gain", ".csv"), {"Delta_Hz", "signal_linear", "signal_dB", "idler_linear", "idler_dB"},
              rows);
    const GainPeak peak = signal_gain_peak(pump.state, p, grid.front(), grid.back());
    const double fwhm = signal_gain_fwhm(pump.state, p, peak);
    // Lorentzian fit restricted to the peak; the full grid holds a mirror peak.
    const GainSpectrum local =
        gain_spectrum(pump.state, p, linspace(peak.Delta - 2.0 * fwhm, peak.Delta + 2.0 * fwhm, 401));
    const double ws = pump.drive.omega_p + peak.Delta;
    write_json(ctx.file("gain", ".json"),
               {{"pump", pump_json(pump, p)},
                {"peak_gain_dB", units::to_db(peak.gain)},
                {"peak_Delta_Hz", rad_to_hz(peak.Delta)},
                {"signal_GHz", units::rad_to_ghz(ws)},
                {"idler_GHz", units::rad_to_ghz(2 * pump.drive.omega_p - ws)},
                {"fwhm_Hz", rad_to_hz(fwhm)},
                {"gain_bandwidth_Hz", rad_to_hz(std::sqrt(peak.gain) * fwhm)},
                {"critical_mode_gain_bandwidth_Hz", rad_to_hz(critical_mode_gain_bandwidth(pump.state, p))},
                {"fit", fit_json(local.fit)}});
}

// ---- squeezing ------------------------------------------------------------

void cmd_squeezing(Section& root, Context& ctx) {
    const DimerParams p = read_dimer(root.sub("dimer"));
    const Pump pump = read_pump(root.sub("pump"), p, kNondegenerateDeltaMHz, 15.0);
    const auto grid = scaled(root.grid("Delta_MHz", -600.0, 600.0, 301), mhz_to_rad(1.0));
    const auto phis = scaled(root.numbers("phi_deg", std::vector<double>{8, 48, 69, 79, 89}), kPi / 180);
    const double eta = root.number("eta", 1.0);
    const double slice = mhz_to_rad(root.number("slice_Delta_MHz", 157.5));
    const auto slice_phis = scaled(root.grid("slice_phi_deg", 0.0, 180.0, 181), kPi / 180);
    root.finish();
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidParams("eta must lie in (0, 1]");

    const SqueezingSpectrum sp = squeezing_spectrum(pump.state, p, grid, phis, eta);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < phis.size(); ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double v = sp.at(i, k);
            rows.push_back({fmt(rad_to_hz(grid[i])), fmt(v), fmt(units::to_db(v)), fmt(phis[k])});
        }
    write_csv(ctx.file("squeezing", ".csv"), {"Delta_Hz", "value_linear", "value_dB", "phi_rad"}, rows);

    const PhaseSlice ps = squeezing_vs_phase(pump.state, p, slice, slice_phis, eta);
    rows.clear();
    for (const auto& [phi, v] : ps.values) rows.push_back({fmt(phi), fmt(v), fmt(units::to_db(v))});
    write_csv(ctx.file("squeezing_phase", ".csv"), {"phi_rad", "value_linear", "value_dB"}, rows);

    const auto rec = scattering_matrix(pump.state, p, slice);
    const auto ex = squeezing_extremes(rec, eta);
    const double G = rec.signal_gain();
    write_json(ctx.file("squeezing", ".json"),
               {{"pump", pump_json(pump, p)},
                {"eta", eta},
                {"slice",
                 {{"Delta_Hz", rad_to_hz(slice)},
                  {"signal_gain_dB", units::to_db(G)},
                  {"min_dB", units::to_db(ex.min)},
                  {"max_dB", units::to_db(ex.max)},
                  {"phi_min_rad", ex.phi_min},
                  {"ideal_min_dB", units::to_db(std::pow(std::sqrt(G) - std::sqrt(G - 1.0), 2))},
                  {"fit", {{"c0", ps.fit.c0}, {"c1", ps.fit.c1}, {"c2", ps.fit.c2}, {"rel_residual", ps.fit.rel_residual}}}}}});
}

// ---- reflection -----------------------------------------------------------

void cmd_reflection(Section& root, Context& ctx) {
    const DimerParams p = read_dimer(root.sub("dimer"));
    const auto probe = scaled(root.grid("probe_GHz", 6.4, 7.8, 561), ghz_to_rad(1.0));
    const double noise = root.number("noise_deg", 0.0) * kPi / 180;
    const auto seed = read_seed(root, ctx);
    root.finish();
    if (!(noise >= 0.0)) throw InvalidParams("noise_deg must be non-negative");
    std::vector<cplx> g;
    std::vector<std::vector<std::string>> rows;
    for (double w : probe) {
        g.push_back(reflection_model(p, w));
        rows.push_back({fmt(rad_to_hz(w)), fmt(g.back().real()), fmt(g.back().imag())});
    }
    write_csv(ctx.file("reflection", ".csv"), {"freq_Hz", "re_gamma", "im_gamma"}, rows);
    json summary = {{"phase_winding_rad", phase_winding(g)}, {"points", probe.size()}};
    if (noise > 0.0) {
        const auto tr = synthetic_trace(p, probe, noise, seed);
        rows.clear();
        for (std::size_t i = 0; i < probe.size(); ++i) rows.push_back({fmt(rad_to_hz(tr.omega[i])), fmt(tr.phase[i])});
        write_csv(ctx.file("trace", ".csv"), {"freq_Hz", "phase_rad"}, rows);
        summary["noise_rad"] = noise;
    }
    write_json(ctx.file("reflection", ".json"), summary);
}

// ---- fit-reflection -------------------------------------------------------

json fit_result_json(const FitResult& r, std::size_t points) {
    json alt = json::array();
    for (const auto& [q, f] : r.alternatives)
        alt.push_back({{"omega_L_GHz", units::rad_to_ghz(q.omega_L)},
                       {"omega_R_GHz", units::rad_to_ghz(q.omega_R)},
                       {"kappa_GHz", units::rad_to_ghz(q.kappa)},
                       {"J_GHz", units::rad_to_ghz(q.J)},
                       {"residual_rad2", f}});
    return {{"omega_L_GHz", units::rad_to_ghz(r.params.omega_L)},
            {"omega_R_GHz", units::rad_to_ghz(r.params.omega_R)},
            {"kappa_GHz", units::rad_to_ghz(r.params.kappa)},
            {"J_GHz", units::rad_to_ghz(r.params.J)},
            {"stderr_GHz", scaled({r.stderr_[0], r.stderr_[1], r.stderr_[2], r.stderr_[3]}, 1.0 / ghz_to_rad(1.0))},
            {"residual_rad2", r.residual},
            {"rms_residual_deg", std::sqrt(r.residual / static_cast<double>(points)) * 180 / kPi},
            {"evaluations", r.evaluations},
            {"starts", r.starts},
            {"converged", r.converged},
            {"alternatives", alt}};
}

void fit_and_write(const ReflectionTrace& tr, const DimerParams& guess, Context& ctx) {
    const FitResult r = fit_reflection(tr, guess);
    write_json(ctx.file("fit", ".json"), fit_result_json(r, tr.omega.size()));
    const DimerParams q = r.to_dimer();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < tr.omega.size(); ++i)
        rows.push_back({fmt(rad_to_hz(tr.omega[i])), fmt(tr.phase[i]), fmt(std::arg(reflection_model(q, tr.omega[i])))});
    write_csv(ctx.file("fit_model", ".csv"), {"freq_Hz", "phase_rad", "model_phase_rad"}, rows);
}

DimerParams read_guess(Section s) {
    DimerParams g;
    g.omega_L = ghz_to_rad(s.number("omega_L_GHz", 7.05));
    g.omega_R = ghz_to_rad(s.number("omega_R_GHz", 7.15));
    g.kappa = ghz_to_rad(s.number("kappa_GHz", 0.25));
    g.J = ghz_to_rad(s.number("J_GHz", 0.2));
    s.finish();
    return g;
}

void cmd_fit_reflection(Section& root, Context& ctx) {
    const std::string path = root.string("trace", std::string(BHD_DATA_DIR) + "/synthetic_trace.csv");
    const DimerParams guess = read_guess(root.sub("guess"));
    root.finish();
    fit_and_write(read_trace_csv(ctx.resolve(path)), guess, ctx);
}

// ---- circuit --------------------------------------------------------------

void cmd_circuit(Section& root, Context& ctx) {
    if (root.has("circuit") && root.has("design")) throw ConfigError("give either 'circuit' or 'design', not both");
    CircuitParams c;
    json design;
    if (root.has("circuit")) {
        c = read_circuit(root.sub("circuit"));
    } else {
        c = design_circuit(read_design(root.sub("design")));
    }
    const auto phis = root.grid("phi_ext", -1.0, 1.0, 401);
    root.finish();
    const DimerParams p = circuit_to_dimer(c);
    const auto tc = flux_tuning_curve(c, phis);
    std::vector<std::vector<std::string>> rows;
    for (const auto& pt : tc.points) rows.push_back({fmt(pt.phi), fmt(rad_to_hz(pt.omega_L)), fmt(rad_to_hz(pt.omega_R))});
    write_csv(ctx.file("tuning", ".csv"), {"phi_ext", "f_L_Hz", "f_R_Hz"}, rows);
    json j = {{"circuit", circuit_json(c)},
              {"dimer", dimer_json(p)},
              {"tuning_range_L_GHz", units::rad_to_ghz(tc.range_L)},
              {"tuning_range_R_GHz", units::rad_to_ghz(tc.range_R)}};
    if (auto w = coupling_regime_warning(c)) j["warning"] = *w;
    write_json(ctx.file("circuit", ".json"), j);
}

// ---- cumulants ------------------------------------------------------------

json cumulant_table_json(const CumulantTable& t) {
    json j = json::object();
    for (const auto& [o, e] : t)
        j[o.key()] = {{"re", e.value.real()}, {"im", e.value.imag()}, {"stderr_re", e.stderr_re}, {"stderr_im", e.stderr_im}};
    return j;
}

void cmd_cumulants(Section& root, Context& ctx) {
    QuadratureSamples s;
    json info;
    if (root.has("samples")) {
        const std::string path = root.string("samples");
        root.finish();
        s = read_samples_csv(ctx.resolve(path));
        info["source"] = path;
    } else {
        const DimerParams p = read_dimer(root.sub("dimer"));
        const Pump pump = read_pump(root.sub("pump"), p, kNondegenerateDeltaMHz, 15.0);
        Section f = root.sub("filter");
        const bool has_offset = f.has("signal_offset_MHz");
        double offset = has_offset ? mhz_to_rad(f.number("signal_offset_MHz")) : 0.0;
        const double bw = mhz_to_rad(f.number("bandwidth_MHz", 10.0));
        f.finish();
        const double eta = root.number("eta", 1.0);
        const int N = root.integer("samples_count", 1000000);
        const auto seed = read_seed(root, ctx);
        const bool dump = root.boolean("write_samples", false);
        root.finish();
        if (!has_offset) {
            if (!pump.peak) throw ConfigError("'filter.signal_offset_MHz' is required with an explicit drive");
            offset = std::abs(pump.peak->Delta);
        }
        if (N < 1) throw ConfigError("'samples_count' must be positive");
        const double wp = pump.drive.omega_p;
        const Eigen::Matrix4d cov = output_covariance(pump.state, p, wp + offset, wp - offset, bw);
        s = sample_gaussian_output(cov, eta, static_cast<std::size_t>(N), seed);
        if (dump) write_samples_csv(ctx.file("samples", ".csv"), s);
        json c = json::array();
        for (int i = 0; i < 4; ++i) c.push_back({cov(i, 0), cov(i, 1), cov(i, 2), cov(i, 3)});
        info = {{"pump", pump_json(pump, p)},
                {"signal_offset_Hz", rad_to_hz(offset)},
                {"bandwidth_Hz", rad_to_hz(bw)},
                {"covariance", c},
                {"eta", eta}};
    }
    const CumulantTable t = estimate_cumulants(s);
    info["samples"] = s.size();
    info["cumulants"] = cumulant_table_json(t);
    write_json(ctx.file("cumulants", ".json"), info);
}

// ---- oracle ---------------------------------------------------------------

void cmd_oracle(Section& root, Context& ctx) {
    const DimerParams p = read_dimer(root.sub("dimer"));
    const Drive d = read_drive(root.sub("drive"), p, kNondegenerateDeltaMHz, 2e8);
    Section fs = root.sub("fock");
    FockConfig cfg;
    cfg.n_max_L = fs.integer("n_max_L", 8);
    cfg.n_max_R = fs.integer("n_max_R", 8);
    cfg.truncation_tol = fs.number("truncation_tol", 1e-6);
    fs.finish();
    root.finish();
    const auto q = lindblad_steady_state(p, d, cfg);
    json sc = json::array();
    for (const auto& s : solve_steady_states(p, d)) sc.push_back(steady_state_json(s));
    json j = {{"a_L", {q.a_L.real(), q.a_L.imag()}},
              {"a_R", {q.a_R.real(), q.a_R.imag()}},
              {"n_L", q.n_L},
              {"n_R", q.n_R},
              {"a_L_a_R", {q.a_L_a_R.real(), q.a_L_a_R.imag()}},
              {"top_layer_population", q.top_layer_population},
              {"trace_error", q.trace_error},
              {"hermiticity_error", q.hermiticity_error},
              {"min_eigenvalue", q.min_eigenvalue},
              {"semiclassical", sc}};
    if (std::abs(d.alpha_in) > 0.0) {
        const cplx g = 1.0 - std::sqrt(p.kappa) * q.a_L / d.alpha_in;
        const cplx lin = reflection_model(p, d.omega_p);
        j["reflection"] = {g.real(), g.imag()};
        j["linear_reflection"] = {lin.real(), lin.imag()};
    }
    write_json(ctx.file("oracle", ".json"), j);
}

// ---- figures --------------------------------------------------------------

json device_dimer() { return json::object(); }  // all defaults

void run_command(CommandFn fn, const json& cfg, Context& ctx, json& resolved, const std::string& step) {
    json r = json::object();
    Section root(&cfg, &r, step);
    fn(root, ctx);
    resolved[step] = r;
}

void figure_1c(Context& ctx, json& resolved) {
    // J = 0.7 kappa, U = -1e-3 kappa, degenerate bare modes.
    const double k = kKappaGHz;
    const json dimer = {{"omega_L_GHz", 7.1}, {"omega_R_GHz", 7.1}, {"J_GHz", 0.7 * k},
                        {"U_L_kHz", -1e-3 * k * 1e6}, {"U_R_kHz", -1e-3 * k * 1e6}};
    const double flux_max = 300.0 * ghz_to_rad(k);
    const json cfg = {{"dimer", dimer},
                      {"delta_MHz", {{"from", -2e3 * k}, {"to", 1.5e3 * k}, {"points", 200}}},
                      {"flux_phps", {{"from", 0.0}, {"to", flux_max}, {"points", 200}}}};
    run_command(cmd_phase_diagram, cfg, ctx, resolved, "phase_diagram");
    json r = json::object();
    const DimerParams p = read_dimer(Section(&cfg["dimer"], &r, "dimer"));
    std::vector<std::vector<std::string>> rows;
    for (double dm : linspace(-2e3 * k, 1.5e3 * k, 200)) {
        const auto f = vanishing_left_locus(p, mhz_to_rad(dm));
        if (f && *f <= flux_max) rows.push_back({fmt(dm * 1e6), fmt(*f)});
    }
    write_csv(ctx.file("locus", ".csv"), {"delta_Hz", "flux_phps"}, rows);
}

void figure_2c(Context& ctx, json& resolved) {
    const json cfg = {{"dimer", device_dimer()}, {"noise_deg", 1.0}, {"seed", 1}};
    run_command(cmd_reflection, cfg, ctx, resolved, "reflection");
    const auto tr = read_trace_csv((ctx.out_dir / ("trace" + ctx.suffix + ".csv")).string());
    json r = json::object();
    const DimerParams guess = read_guess(Section(nullptr, &r, "guess"));
    resolved["fit"] = {{"guess", r}};
    fit_and_write(tr, guess, ctx);
}

void figure_2d(Context& ctx, json& resolved) {
    const json cfg = {{"design", json::object()}, {"phi_ext", {{"from", -0.6}, {"to", 0.6}, {"points", 121}}}};
    run_command(cmd_circuit, cfg, ctx, resolved, "circuit");
    const CircuitParams c = design_circuit(DesignTargets{ghz_to_rad(7.0), ghz_to_rad(7.2), units::hz_to_rad(-80e3),
                                                         ghz_to_rad(0.25), ghz_to_rad(kKappaGHz), 10, 0.5, 50.0});
    std::vector<std::vector<std::string>> rows;
    for (double phi : linspace(-0.6, 0.6, 121)) {
        CircuitParams at = c;
        at.phi_ext = phi;
        const DimerParams p = circuit_to_dimer(at);
        for (double f : linspace(4.5, 7.8, 331))
            rows.push_back({fmt(phi), fmt(f * 1e9), fmt(std::arg(reflection_model(p, ghz_to_rad(f))))});
    }
    resolved["flux_map"] = {{"phi_ext", {{"from", -0.6}, {"to", 0.6}, {"points", 121}}},
                            {"probe_GHz", {{"from", 4.5}, {"to", 7.8}, {"points", 331}}}};
    write_csv(ctx.file("flux_map", ".csv"), {"phi_ext", "freq_Hz", "phase_rad"}, rows);
}

void gain_series(Context& ctx, json& resolved, double delta_MHz, const std::vector<double>& gains_dB) {
    for (double g : gains_dB) {
        const json cfg = {{"pump", {{"delta_MHz", delta_MHz}, {"gain_dB", g}}}};
        const std::string saved = ctx.suffix;
        ctx.suffix = "_" + fmt(g) + "dB";
        run_command(cmd_gain, cfg, ctx, resolved, "gain" + ctx.suffix);
        ctx.suffix = saved;
    }
}

void figure_3a(Context& ctx, json& resolved) { gain_series(ctx, resolved, kDegenerateDeltaMHz, {15.0, 20.0}); }

void figure_3bc(Context& ctx, json& resolved) {
    gain_series(ctx, resolved, kNondegenerateDeltaMHz, {10.0, 15.0, 20.0, 25.0});
}

void figure_4a(Context& ctx, json& resolved) {
    const json cfg = {{"pump", {{"delta_MHz", kNondegenerateDeltaMHz}, {"gain_dB", 15.0}}}};
    run_command(cmd_squeezing, cfg, ctx, resolved, "squeezing");
}

void figure_4b(Context& ctx, json& resolved) {
    figure_4a(ctx, resolved);
    // Inset: best squeezing at the gain peak versus peak gain, against the ideal two-mode squeezer.
    json r = json::object();
    const DimerParams p = read_dimer(Section(nullptr, &r, "dimer"));
    std::vector<std::vector<std::string>> rows;
    const std::vector<double> gains{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    const double U = std::max(std::abs(p.U_L), std::abs(p.U_R));
    for (double gdb : gains) {
        const auto op = operating_point_for_gain(p, mhz_to_rad(kNondegenerateDeltaMHz), units::from_db(gdb),
                                                 6.0 * p.kappa * p.kappa / U, 3.0 * p.kappa);
        const auto rec = scattering_matrix(op.state, p, op.peak.Delta);
        const double G = rec.signal_gain();
        rows.push_back({fmt(units::to_db(G)), fmt(units::to_db(squeezing_extremes(rec).min)),
                        fmt(units::to_db(std::pow(std::sqrt(G) - std::sqrt(G - 1.0), 2)))});
    }
    resolved["inset"] = {{"delta_MHz", kNondegenerateDeltaMHz}, {"gain_dB", gains}};
    write_csv(ctx.file("squeezing_vs_gain", ".csv"), {"gain_dB", "model_min_dB", "ideal_min_dB"}, rows);
}

void figure_4c(Context& ctx, json& resolved) {
    const json cfg = {{"pump", {{"delta_MHz", kNondegenerateDeltaMHz}, {"gain_dB", 15.0}}},
                      {"filter", {{"bandwidth_MHz", 10.0}}},
                      {"seed", 1}};
    run_command(cmd_cumulants, cfg, ctx, resolved, "cumulants");
}

}  // namespace

std::string Context::file(const std::string& stem, const std::string& ext) {
    const std::string name = stem + suffix + ext;
    outputs.push_back(name);
    return (out_dir / name).string();
}

std::string Context::resolve(const std::string& path) const {
    const std::filesystem::path p(path);
    return p.is_absolute() ? path : (base_dir / p).string();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << '\n';
}

const std::vector<CommandInfo>& commands() {
    static const std::vector<CommandInfo> list = {
        {"steady-state", "classical steady states, stability and region at one drive", cmd_steady_state},
        {"phase-diagram", "S/M/P classification over a (detuning, flux) grid", cmd_phase_diagram},
        {"gain", "signal and idler gain spectra at a pump operating point", cmd_gain},
        {"squeezing", "two-mode squeezing spectrum and phase slice", cmd_squeezing},
        {"reflection", "linear reflection trace, optionally with synthetic phase noise", cmd_reflection},
        {"fit-reflection", "fit (omega_L, omega_R, kappa, J) to a phase trace", cmd_fit_reflection},
        {"circuit", "circuit elements to dimer parameters and flux tuning", cmd_circuit},
        {"cumulants", "cumulants of sampled or loaded heterodyne records", cmd_cumulants},
        {"oracle", "truncated Fock-space master-equation steady state", cmd_oracle},
    };
    return list;
}

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names = {"1c", "2c", "2d", "3a", "3bc", "4a", "4b", "4c"};
    return names;
}

void run_figure(const std::string& name, Context& ctx, json& resolved) {
    if (name == "1c") return figure_1c(ctx, resolved);
    if (name == "2c") return figure_2c(ctx, resolved);
    if (name == "2d") return figure_2d(ctx, resolved);
    if (name == "3a") return figure_3a(ctx, resolved);
    if (name == "3bc") return figure_3bc(ctx, resolved);
    if (name == "4a") return figure_4a(ctx, resolved);
    if (name == "4b") return figure_4b(ctx, resolved);
    if (name == "4c") return figure_4c(ctx, resolved);
    throw ConfigError("unknown figure '" + name + "'");
}

}  // namespace bhd::cli
