#pragma once

// Command-line front end. `run` is the whole program minus process setup, so
// tests drive it with in-memory streams.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pvrfid/config.hpp"

#ifndef PVRFID_DATA_DIR
#define PVRFID_DATA_DIR "data"
#endif

namespace pvrfid {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInfeasible = 2;

inline std::filesystem::path data_dir() { return PVRFID_DATA_DIR; }

// FNV-1a, 64 bit. Only used to fingerprint inputs in reports.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct RunReport {
  std::string command;
  std::string summary;
  std::string input_digest;
  std::vector<std::pair<std::string, std::string>> headlines;
  std::vector<std::string> csv_paths;

  void add(std::string key, double value) { headlines.emplace_back(std::move(key), format_sig6(value)); }
  void add(std::string key, std::string value) { headlines.emplace_back(std::move(key), std::move(value)); }

  std::string render() const {
    std::string out = "pvrfid " + command + ": " + summary + "\n";
    out += "command=" + command + "\n";
    out += "input_digest=" + input_digest + "\n";
    for (const auto& [k, v] : headlines) out += k + "=" + v + "\n";
    for (const auto& p : csv_paths) out += "csv=" + p + "\n";
    return out;
  }
};

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  std::string sweep_path;
  std::string eqe_path;
  std::string spectrum_path;
};

namespace cli_detail {

inline void emit_csv(const RunOptions& opt, RunReport& report, const std::string& name,
                     const std::string& content) {
  if (opt.out_dir.empty()) return;
  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  write_text_file(path, content);
  report.csv_paths.push_back(path.generic_string());
}

inline std::string optional_time(const std::optional<double>& t) {
  return t ? format_sig6(*t) : std::string("none");
}

inline int cmd_iv(const Config& cfg, const RunOptions& opt, RunReport& r) {
  const auto m = pv_from(cfg);
  const auto op = mpp(m);
  const double eta = efficiency_from_summary(cfg.number("pv.jsc_mA_cm2"), m.voc, cfg.number("pv.ff"));
  r.summary = "P_mpp " + format_sig6(op.p * 1e3) + " mW at " + format_sig6(op.v) + " V";
  r.add("isc_A", m.isc);
  r.add("voc_V", m.voc);
  r.add("n_ideality", m.n_ideality);
  r.add("n_series", std::to_string(m.n_series));
  r.add("v_mpp_V", op.v);
  r.add("i_mpp_A", op.i);
  r.add("p_mpp_W", op.p);
  r.add("fill_factor", fill_factor(m));
  r.add("efficiency_from_jsc_voc_ff", eta);
  r.add("efficiency_stated", cfg.number("pv.efficiency"));

  std::string csv = "v_V,i_A,p_W\n";
  constexpr int kPoints = 1000;
  for (int k = 0; k <= kPoints; ++k) {
    const double v = m.voc * k / kPoints;
    const double i = iv_current(m, v);
    csv += format_sig6(v) + "," + format_sig6(i) + "," + format_sig6(v * i) + "\n";
  }
  emit_csv(opt, r, "iv.csv", csv);
  return kExitOk;
}

inline int cmd_harvest(const Config& cfg, const RunOptions& opt, RunReport& r) {
  const double p = harvest_power(cfg.number("pv.efficiency"), cfg.number("pv.area_cm2"),
                                 cfg.number("pv.irradiance_mW_cm2"));
  const auto eqe_path = opt.eqe_path.empty() ? data_dir() / "eqe_perovskite.csv"
                                             : std::filesystem::path(opt.eqe_path);
  const auto spec_path = opt.spectrum_path.empty() ? data_dir() / "am15g.csv"
                                                   : std::filesystem::path(opt.spectrum_path);
  const auto eqe = load_spectral_response(eqe_path, bandgap_wavelength_nm(cfg.number("pv.bandgap_eV")));
  const auto spectrum = load_spectrum(spec_path);
  const double jsc = jsc_from_eqe(eqe, spectrum);
  r.summary = "flat-efficiency harvest " + format_sig6(p * 1e3) + " mW";
  r.add("p_harvest_W", p);
  r.add("jsc_eqe_mA_cm2", jsc);
  r.add("bandgap_cutoff_nm", eqe.bandgap_cutoff_nm);
  r.add("spectrum", spectrum.label);
  return kExitOk;
}

inline int cmd_load(const Config& cfg, const RunOptions& opt, RunReport& r) {
  const auto ic = ic_from(cfg);
  const auto sched = schedule_from(cfg);
  const double v = ic.v_threshold;
  const double i = average_current(ic, sched.rate);
  r.summary = "average " + format_sig6(v * i * 1e6) + " uW at " + format_sig6(sched.rate) +
              " measurements/h";
  r.add("rate_per_hour", sched.rate);
  r.add("duty_fraction", duty_fraction(ic, sched.rate));
  r.add("i_avg_A", i);
  r.add("p_avg_W", average_power(ic, sched.rate, v));
  r.add("daily_energy_J", daily_energy(ic, sched, v));
  r.add("max_rate_per_hour", max_rate(ic));
  // Reference operating point for the demand curve and its quoted figure.
  r.add("formula_p_20000_per_hour_W", average_power(ic, std::min(20000.0, max_rate(ic)), v));
  r.add("reference_p_20000_per_hour_W", 20e-6);

  std::string csv = "rate_per_hour,i_avg_A,p_avg_W\n";
  for (double rate : {0.0, 10.0, 100.0, 1000.0, 5000.0, 10000.0, 20000.0, 50000.0, 100000.0,
                      200000.0, max_rate(ic)}) {
    if (rate > max_rate(ic)) continue;
    const double ia = average_current(ic, rate);
    csv += format_sig6(rate) + "," + format_sig6(ia) + "," + format_sig6(ia * v) + "\n";
  }
  emit_csv(opt, r, "load_curve.csv", csv);
  return kExitOk;
}

inline int cmd_simulate(const Config& cfg, const RunOptions& opt, RunReport& r) {
  const auto s = simulation_from(cfg);
  const auto trace = simulate(s);
  const auto t_on = time_to_voltage(trace, s.ic.v_threshold);
  const double on = on_time(trace, s.ic.v_threshold);
  r.summary = "on for " + format_sig6(on / 60.0) + " min of " + format_sig6(s.duration / 60.0);
  r.add("records", std::to_string(trace.size()));
  r.add("t_threshold_s", optional_time(t_on));
  r.add("t_vmax_s", optional_time(time_to_voltage(trace, s.cap.v_max)));
  r.add("on_time_s", on);
  r.add("final_V", trace.back().v);
  r.add("measurements", std::to_string(trace.back().measurement_count));
  emit_csv(opt, r, "trace.csv", format_trace_csv(trace));
  return kExitOk;
}

inline int cmd_availability(const Config& cfg, const RunOptions& opt, RunReport& r) {
  const auto s = availability_from(cfg);
  const auto trace = simulate(s);
  auto a = energy_balance(s);
  a.trace_fraction = trace_availability(trace);
  r.summary = "energy balance " + format_sig6(a.energy_balance) + ", trace " +
              format_sig6(a.trace_fraction);
  r.add("availability_energy_balance", a.energy_balance);
  r.add("availability_trace", a.trace_fraction);
  r.add("harvest_J", a.harvest_energy);
  r.add("usable_J", a.usable_energy);
  r.add("leak_J", a.leak_energy);
  r.add("required_J", a.required_energy);
  r.add("operating_V", a.operating_voltage);
  emit_csv(opt, r, "availability_trace.csv", format_trace_csv(trace));
  return kExitOk;
}

inline int cmd_range(const Config& cfg, const RunOptions& opt, RunReport& r) {
  const auto link = link_from(cfg);
  const auto ic = ic_from(cfg);
  const double fwd_p = forward_limited_range(link, ic.sens_passive);
  const double fwd_a = forward_limited_range(link, ic.sens_assisted);
  const double rev = reverse_limited_range(link);
  const double read_p = read_range(link, ic.sens_passive);
  const double read_a = read_range(link, ic.sens_assisted);
  r.summary = "passive " + format_sig6(read_p) + " m, assisted " + format_sig6(read_a) + " m";
  r.add("forward_passive_m", fwd_p);
  r.add("forward_assisted_m", fwd_a);
  r.add("reverse_m", rev);
  r.add("read_range_passive_m", read_p);
  r.add("read_range_assisted_m", read_a);
  r.add("range_ratio", read_a / read_p);
  r.add("sensitivity_ratio", range_ratio(ic.sens_passive, ic.sens_assisted));
  r.add("in_us_band", in_us_band(link.frequency) ? "1" : "0");
  if (!opt.sweep_path.empty()) {
    const auto sweep = load_threshold_sweep(opt.sweep_path, cfg.number("link.reference_distance_m"));
    emit_csv(opt, r, "ranges.csv", format_range_csv(sweep_to_range(sweep, link.eirp)));
  }
  return kExitOk;
}

inline int cmd_sweep(const Config& cfg, const RunOptions& opt, RunReport& r) {
  const auto templ = availability_from(cfg);
  std::vector<double> leaks;
  for (double ua : cfg.list("sweep.leak_grid_uA")) leaks.push_back(ua * 1e-6);
  const auto table = persistence_sweep(cfg.list("sweep.cap_grid_F"), leaks, templ);
  r.summary = std::to_string(table.capacitances.size()) + " x " +
              std::to_string(table.leaks.size()) + " persistence grid";
  for (std::size_t i = 0; i < table.capacitances.size(); ++i) {
    std::string row;
    for (std::size_t j = 0; j < table.leaks.size(); ++j)
      row += (j ? "," : "") + format_sig6(table.energy_balance[i][j]);
    r.add("row_" + format_sig6(table.capacitances[i]) + "F", row);
  }
  emit_csv(opt, r, "persistence.csv", format_persistence_csv(table, table.energy_balance));
  emit_csv(opt, r, "persistence_trace.csv", format_persistence_csv(table, table.trace_fraction));
  return kExitOk;
}

inline int cmd_size(const Config& cfg, const RunOptions&, RunReport& r, std::ostream& err) {
  const auto req = sizing_from(cfg);
  const auto result = size_system(req);
  if (!result) {
    r.summary = "infeasible: no grid point reaches availability " +
                format_sig6(req.target_availability);
    r.add("feasible", "0");
    err << "error: sizing infeasible on the given grids\n";
    return kExitInfeasible;
  }
  r.summary = format_sig6(result->area) + " cm2 PV with " + format_sig6(result->capacitance) +
              " F storage";
  r.add("feasible", "1");
  r.add("area_cm2", result->area);
  r.add("capacitance_F", result->capacitance);
  r.add("availability", result->availability);
  return kExitOk;
}

}  // namespace cli_detail

inline const std::vector<std::pair<std::string, std::string>>& subcommands() {
  static const std::vector<std::pair<std::string, std::string>> list = {
      {"iv", "fit the PV module and report its IV curve and maximum power point"},
      {"harvest", "flat-efficiency and EQE-weighted harvest estimates"},
      {"load", "IC average current, power and daily energy"},
      {"simulate", "charge/discharge time series"},
      {"availability", "one-day availability by energy balance and by simulation"},
      {"range", "forward, reverse and read ranges; optional threshold sweep"},
      {"sweep", "persistence over capacitance x leak grids"},
      {"size", "smallest PV area and capacitance reaching a target availability"},
  };
  return list;
}

// args[0] is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for photovoltaic-powered RFID sensor tags", "pvrfid"};
  RunOptions opt;
  bool dump = false;
  double dt = 0.0;
  long long seed = 0;
  app.add_option("--config", opt.config_path, "flat key = value configuration file");
  app.add_option("--out", opt.out_dir, "directory for CSV outputs");
  app.add_flag("--dump-config", dump, "print the effective configuration and exit");
  auto* dt_opt = app.add_option("--dt", dt, "time step override (s)");
  app.add_option("--seed", seed, "reserved; runs are deterministic");
  app.require_subcommand(0, 1);

  std::vector<CLI::App*> subs;
  for (const auto& [name, desc] : subcommands()) {
    auto* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    subs.push_back(sub);
  }
  app.get_subcommand("range")->add_option("--sweep", opt.sweep_path,
                                          "CSV frequency_hz,threshold_dbm");
  app.get_subcommand("harvest")->add_option("--eqe", opt.eqe_path, "CSV wavelength_nm,value");
  app.get_subcommand("harvest")->add_option("--spectrum", opt.spectrum_path,
                                            "CSV wavelength_nm,value");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    Config cfg = opt.config_path.empty() ? Config::defaults() : parse_config(opt.config_path);
    if (dt_opt->count() > 0) {
      cfg.set("sim.dt_s", format_roundtrip(dt));
      cfg.set("sizing.dt_s", format_roundtrip(dt));
    }
    if (dump) {
      out << cfg.dump();
      return kExitOk;
    }
    CLI::App* chosen = nullptr;
    for (auto* s : subs)
      if (s->parsed()) chosen = s;
    if (!chosen) {
      err << "error: a subcommand is required (see --help)\n";
      return kExitValidation;
    }

    RunReport report;
    report.command = chosen->get_name();
    std::uint64_t h = fnv1a64(report.command + "\n" + cfg.dump());
    for (const auto& p : {opt.sweep_path, opt.eqe_path, opt.spectrum_path})
      if (!p.empty()) h = fnv1a64(read_text_file(p), h);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    report.input_digest = hex;

    using namespace cli_detail;
    int code = kExitOk;
    const auto& name = report.command;
    if (name == "iv") code = cmd_iv(cfg, opt, report);
    else if (name == "harvest") code = cmd_harvest(cfg, opt, report);
    else if (name == "load") code = cmd_load(cfg, opt, report);
    else if (name == "simulate") code = cmd_simulate(cfg, opt, report);
    else if (name == "availability") code = cmd_availability(cfg, opt, report);
    else if (name == "range") code = cmd_range(cfg, opt, report);
    else if (name == "sweep") code = cmd_sweep(cfg, opt, report);
    else if (name == "size") code = cmd_size(cfg, opt, report, err);
    out << report.render();
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace pvrfid
