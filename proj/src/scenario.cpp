#include "tunneltime/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tunneltime/barrier.hpp"
#include "tunneltime/numerics.hpp"
#include "tunneltime/traversal.hpp"
#include "tunneltime/wavepacket.hpp"
#include "tunneltime/weakmeas.hpp"

namespace tunneltime {

using nlohmann::json;

std::vector<std::string> scenario_names() {
  return {"fig1", "eta-scan", "sumrule", "causality", "weakdemo", "free-check"};
}

json scenario_defaults(const std::string& name) {
  if (name == "fig1") {
    return json{
        {"physics",
         {{"eps0_tauc", 6000.0},
          {"epsp_tauc", 6007.5},
          {"V_tauc", 15.0},
          {"dz_over_b", 0.55},
          {"z0_over_b", 2.5},
          {"t_over_tauc", 100.0}}},
        {"numerics",
         {{"z_min", 2.16},
          {"z_max", 6.0},
          {"z_count", 1537},
          {"p_span_sigmas", 10.0},
          {"p_count", 601},
          {"eta_tau_min", 1.02},
          {"eta_tau_max", 40.0},
          {"eta_tau_count", 2048}}}};
  }
  if (name == "eta-scan") {
    return json{
        {"physics", {{"eps0_tauc", 50.0}, {"p_b", 30.0}, {"kappa_b", 10.0}}},
        {"numerics",
         {{"half_width", 160.0},
          {"tau_max", 50.0},
          {"taper_fraction", 0.1},
          {"smoothing_half_width", 0.5},
          {"suppression_tau", 0.9},
          {"pair_tau_lo", -4.0},
          {"pair_tau_hi", -1.2},
          {"semicl_half_width", 45.0},
          {"semicl_taper", 0.30},
          {"semicl_tau_lo", 1.5},
          {"semicl_tau_hi", 4.0}}}};
  }
  if (name == "sumrule") {
    return json{
        {"physics", {{"eps0_tauc", 50.0}, {"p_b", 10.0}}},
        {"numerics",
         {{"taper_fraction", 0.1},
          {"tolerance", 1e-3},
          {"cases",
           json::array({json{{"kappa_b", 5.0}, {"half_width", 15.0}, {"tau_max", 350.0}},
                        json{{"kappa_b", 10.0}, {"half_width", 15.0}, {"tau_max", 500.0}},
                        json{{"kappa_b", 20.0}, {"half_width", 30.0}, {"tau_max", 900.0}},
                        json{{"kappa_b", 0.0}, {"half_width", 15.0}, {"tau_max", 200.0}}})}}}};
  }
  if (name == "causality") {
    return json{
        {"physics",
         {{"eps0_tauc", 50.0},
          {"p_b", 30.0},
          {"kappa_b", 10.0},
          {"dz_over_b", 3.0},
          {"z0_over_b", 16.0},
          {"t_over_tauc", 60.0}}},
        {"numerics",
         {{"cutoff_over_dz", 4.0},
          {"p_half_span", 12.0},
          {"p_step", 0.005},
          {"z_min", 2.0},
          {"z_max", 62.0},
          {"z_count", 3001},
          {"margin_beyond_front", 0.5},
          {"envelope_step", 0.005},
          {"threshold", 1e-4}}}};
  }
  if (name == "weakdemo") {
    return json{
        {"meter", {{"alpha", 5.0}, {"pointer_width", 20.0}}},
        {"numerics", {{"grid_sigmas", 4.0}, {"grid_count", 4001}}},
        {"diagnostics",
         {{"anomalous_alpha", 100.0}, {"weak_sigma_factor", 20.0}, {"strong_sigma", 0.1}}}};
  }
  if (name == "free-check") {
    return json{
        {"physics",
         {{"eps0_tauc", 6000.0},
          {"epsp_tauc", 6007.5},
          {"dz_over_b", 0.55},
          {"z0_over_b", 2.5},
          {"t_over_tauc", 100.0}}},
        {"numerics",
         {{"z_halfspan_dz", 8.0}, {"z_count", 3201}, {"p_span_sigmas", 10.0}, {"p_count", 601}}}};
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

namespace {

void deep_merge(json& base, const json& overlay) {
  if (!overlay.is_object() || !base.is_object()) {
    base = overlay;
    return;
  }
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (base.contains(it.key()))
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

void apply_override(json& params, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain string
  }
  json* node = &params;
  size_t pos = 0;
  while (true) {
    const size_t dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (part.empty()) throw std::invalid_argument("override key '" + key + "' has an empty segment");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct OutputSink {
  std::filesystem::path dir;
  std::string hash;
  bool quiet = false;
  std::vector<std::string> files;

  void write_curve(const std::string& name, const std::string& abscissa_name,
                   const ArrayXd& abscissa, const ArrayXcd& values) {
    std::ofstream os(dir / name, std::ios::binary);
    os.imbue(std::locale::classic());
    os << "# manifest=" << hash << "\n";
    os << abscissa_name << ",re,im,abs\n";
    for (Index i = 0; i < abscissa.size(); ++i) {
      os << format17(abscissa[i]) << ',' << format17(values[i].real()) << ','
         << format17(values[i].imag()) << ',' << format17(std::abs(values[i])) << "\n";
    }
    files.push_back(name);
  }

  void write_table(const std::string& name, const std::string& header,
                   const std::vector<std::vector<double>>& rows) {
    std::ofstream os(dir / name, std::ios::binary);
    os.imbue(std::locale::classic());
    os << "# manifest=" << hash << "\n" << header << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format17(row[i]);
      os << "\n";
    }
    files.push_back(name);
  }

  void write_summary(json summary) {
    summary["manifest_hash"] = hash;
    std::ofstream os(dir / "summary.json", std::ios::binary);
    os << summary.dump(2) << "\n";
    files.push_back("summary.json");
  }

  void note(const std::string& line) const {
    if (!quiet) std::cout << line << "\n";
  }
};

double interior_energy_for_kappa(double eps0, double kappa_b) {
  return std::sqrt((eps0 - kappa_b) * (eps0 + kappa_b));
}

// ---------------------------------------------------------------- fig1

RunStatus run_fig1(const ScenarioConfig& cfg, OutputSink& out) {
  const json& ph = cfg.params.at("physics");
  const json& nu = cfg.params.at("numerics");
  const double eps0 = ph.at("eps0_tauc");
  const double eps_p = ph.at("epsp_tauc");
  const double v_height = ph.at("V_tauc");
  const double t = ph.at("t_over_tauc");

  const ParticleSpec particle = ParticleSpec::from_energy(eps0, eps_p);
  const BarrierSpec barrier(v_height, 1.0);
  const WavepacketSpec packet(particle.momentum, ph.at("dz_over_b"), ph.at("z0_over_b"));

  const UniformGrid z_grid = UniformGrid::over(nu.at("z_min"), nu.at("z_max"), nu.at("z_count"));
  const double sigma = packet.spectral_sigma();
  const double span = nu.at("p_span_sigmas");
  const UniformGrid p_grid = UniformGrid::over(particle.momentum - span * sigma,
                                               particle.momentum + span * sigma,
                                               nu.at("p_count"));

  const ComplexField free = free_pulse(packet, eps0, z_grid, t, p_grid);
  const ComplexField tun = transmitted_pulse_spectral(packet, particle, barrier, z_grid, t, p_grid);
  const ComplexField semi = semiclassical_pulse(packet, particle, barrier, z_grid, t);

  out.write_curve("free_pulse.csv", "z_over_b", z_grid.points(), free.values);
  out.write_curve("tunnel_pulse.csv", "z_over_b", z_grid.points(), tun.values);
  out.write_curve("semiclassical_pulse.csv", "z_over_b", z_grid.points(), semi.values);

  // Traversal amplitude curves at carrier momentum (closed-form saddle route
  // at this scale) and the translated envelope factor at the tunnel peak.
  const UniformGrid tau_grid = UniformGrid::over(nu.at("eta_tau_min"), nu.at("eta_tau_max"),
                                                 nu.at("eta_tau_count"));
  const BarrierSpec no_barrier(0.0, 1.0);
  ArrayXcd eta_free_vals(tau_grid.count), eta_tun_vals(tau_grid.count);
  for (Index i = 0; i < tau_grid.count; ++i) {
    eta_free_vals[i] = eta_semiclassical(particle, no_barrier, tau_grid.point(i));
    eta_tun_vals[i] = eta_semiclassical(particle, barrier, tau_grid.point(i));
  }
  out.write_curve("eta_free.csv", "tau_over_tauc", tau_grid.points(), eta_free_vals);
  out.write_curve("eta_tunnel.csv", "tau_over_tauc", tau_grid.points(), eta_tun_vals);

  const double z_peak_tun = locate_peak(tun.samples());
  const double v0 = particle.group_velocity();
  ArrayXcd gfac(tau_grid.count);
  for (Index i = 0; i < tau_grid.count; ++i) {
    const double arg = z_peak_tun + packet.offset - barrier.width - v0 * (t - tau_grid.point(i));
    gfac[i] = packet.envelope(arg);
  }
  out.write_curve("gfactor.csv", "tau_over_tauc", tau_grid.points(), gfac);

  const double z_peak_free = locate_peak(free.samples());
  const double advancement = z_peak_tun - z_peak_free;
  const Complex tau_v = saddle_time(particle, barrier);
  const Complex t0 = transmission_exact(particle, barrier.height, barrier);
  const double magnification =
      tun.values.abs().maxCoeff() / (std::abs(t0) * free.values.abs().maxCoeff());
  const double predicted_mag =
      std::exp(std::pow(v0 * std::abs(tau_v) / packet.width, 2));

  const double peak_cut = 0.5 * tun.values.abs().maxCoeff();
  double linf = 0.0;
  for (Index i = 0; i < z_grid.count; ++i)
    if (std::abs(tun.values[i]) >= peak_cut)
      linf = std::max(linf, std::abs(semi.values[i] - tun.values[i]));
  linf /= tun.values.abs().maxCoeff();

  const auto z_median = [&](const ComplexField& f) {
    ArrayXd w = f.values.abs2();
    const double half = 0.5 * w.sum();
    double acc = 0.0;
    for (Index i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (acc >= half) return f.z_grid.point(i);
    }
    return f.z_grid.last();
  };

  out.write_summary(json{
      {"peak_free_z", z_peak_free},
      {"peak_tunnel_z", z_peak_free + advancement},
      {"advancement_b", advancement},
      {"classical_free_peak_z", -packet.offset + v0 * t},
      {"b_over_v0_tauc", classical_crossing_time(particle, barrier)},
      {"tau_V_imag_tauc", tau_v.imag()},
      {"log_abs_transmission", log_transmission_exact(particle, barrier.height, barrier).real()},
      {"magnification_measured", magnification},
      {"magnification_predicted", predicted_mag},
      {"semiclassical_linf_peak_region", linf},
      {"z_median_free", z_median(free)},
      {"z_median_tunnel", z_median(tun)},
  });
  out.note("fig1: advancement " + format17(advancement) + " b");
  return RunStatus::ok;
}

// ---------------------------------------------------------------- eta-scan

RunStatus run_eta_scan(const ScenarioConfig& cfg, OutputSink& out) {
  const json& ph = cfg.params.at("physics");
  const json& nu = cfg.params.at("numerics");
  const double eps0 = ph.at("eps0_tauc");
  const double p = ph.at("p_b");
  const double kappa_b = ph.at("kappa_b");

  const ParticleSpec particle(eps0, p);
  const BarrierSpec free_barrier(0.0, 1.0);
  const BarrierSpec tunnel_barrier(particle.energy() - interior_energy_for_kappa(eps0, kappa_b), 1.0);

  const double half_width = nu.at("half_width");
  const double tau_max = nu.at("tau_max");
  const Apodization taper = Apodization::cosine_taper(nu.at("taper_fraction"));

  const WWindow w_free = WWindow::for_tau_range(0.0, half_width, tau_max, taper);
  const UniformGrid tau_grid = tau_grid_for_window(w_free, tau_max);
  const TraversalAmplitude eta_free = eta_numeric(particle, free_barrier, w_free, tau_grid);

  const WWindow w_tun =
      WWindow::for_tau_range(tunnel_barrier.height, half_width, tau_max, taper);
  const TraversalAmplitude eta_tun = eta_numeric(particle, tunnel_barrier, w_tun, tau_grid);

  out.write_curve("eta_free.csv", "tau_over_tauc", tau_grid.points(), eta_free.values);
  out.write_curve("eta_tunnel.csv", "tau_over_tauc", tau_grid.points(), eta_tun.values);

  // Subluminal suppression and stationary region of the free amplitude.
  const double sup_tau = nu.at("suppression_tau");
  double inner = 0.0;
  for (Index i = 0; i < tau_grid.count; ++i)
    if (std::abs(tau_grid.point(i)) < sup_tau)
      inner = std::max(inner, std::abs(eta_free.values[i]));
  const double suppression = inner / eta_free.values.abs().maxCoeff();
  const double stationary =
      stationary_point_estimate(eta_free, nu.at("smoothing_half_width"));
  const double pair_freq =
      zero_crossing_frequency(eta_free, nu.at("pair_tau_lo"), nu.at("pair_tau_hi"));

  // Semiclassical comparison on the narrow echo-free window.
  const double lo = nu.at("semicl_tau_lo"), hi = nu.at("semicl_tau_hi");
  const WWindow w_cmp = WWindow::for_tau_range(tunnel_barrier.height, nu.at("semicl_half_width"),
                                               tau_max,
                                               Apodization::cosine_taper(nu.at("semicl_taper")));
  const double dtau_cmp = 0.7 * M_PI / std::max(60.0, double(nu.at("semicl_half_width")));
  const Index n_cmp = static_cast<Index>(std::ceil((hi - lo) / dtau_cmp)) + 1;
  const UniformGrid tau_cmp = UniformGrid::over(lo, hi, n_cmp);
  const TraversalAmplitude eta_cmp = eta_numeric(particle, tunnel_barrier, w_cmp, tau_cmp);
  const Complex align = incident_phase(particle, tunnel_barrier);
  ArrayXcd aligned = eta_cmp.values / align;  // multiply by exp(+i p b)
  ArrayXcd semicl(tau_cmp.count);
  for (Index i = 0; i < tau_cmp.count; ++i)
    semicl[i] = eta_semiclassical(particle, tunnel_barrier, tau_cmp.point(i));
  const Complex diff2 = trapezoid(tau_cmp, (aligned - semicl).abs2().cast<Complex>());
  const Complex ref2 = trapezoid(tau_cmp, semicl.abs2().cast<Complex>());
  const double l2 = std::sqrt(diff2.real() / ref2.real());
  out.write_curve("eta_numeric_aligned.csv", "tau_over_tauc", tau_cmp.points(), aligned);
  out.write_curve("eta_semiclassical.csv", "tau_over_tauc", tau_cmp.points(), semicl);

  out.write_summary(json{
      {"suppression_ratio", suppression},
      {"suppression_window_tauc", sup_tau},
      {"stationary_point_tauc", stationary},
      {"classical_b_over_v0", classical_crossing_time(particle, free_barrier)},
      {"pair_oscillation_frequency", pair_freq},
      {"rest_energy_tauc", eps0},
      {"semiclassical_l2", l2},
      {"V_tauc", tunnel_barrier.height},
  });
  out.note("eta-scan: suppression " + format17(suppression) + ", semicl L2 " + format17(l2));
  return RunStatus::ok;
}

// ---------------------------------------------------------------- sumrule

RunStatus run_sumrule(const ScenarioConfig& cfg, OutputSink& out) {
  const json& ph = cfg.params.at("physics");
  const json& nu = cfg.params.at("numerics");
  const double eps0 = ph.at("eps0_tauc");
  const double p = ph.at("p_b");
  const ParticleSpec particle(eps0, p);
  const Apodization taper = Apodization::cosine_taper(nu.at("taper_fraction"));
  const double tol = nu.at("tolerance");

  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  for (const json& case_cfg : nu.at("cases")) {
    const double kappa_b = case_cfg.at("kappa_b");
    const double height =
        kappa_b > 0.0 ? particle.energy() - interior_energy_for_kappa(eps0, kappa_b) : 0.0;
    const BarrierSpec barrier(height, 1.0);
    const WWindow window =
        WWindow::for_tau_range(height, case_cfg.at("half_width"), case_cfg.at("tau_max"), taper);
    const UniformGrid tau_grid = tau_grid_for_window(window, case_cfg.at("tau_max"));
    const TraversalAmplitude eta = eta_numeric(particle, barrier, window, tau_grid);
    const SumRuleCheck check = sum_rule_check(eta, particle);
    worst = std::max(worst, check.relative_error);
    rows.push_back({kappa_b, height, check.integral.real(), check.integral.imag(),
                    check.transmission.real(), check.transmission.imag(),
                    check.relative_error});
    out.note("sumrule: kappa_b=" + format17(kappa_b) + " rel_err=" +
             format17(check.relative_error));
  }
  out.write_table("sumrule.csv",
                  "kappa_b,V_tauc,re_integral,im_integral,re_T,im_T,rel_err", rows);
  const bool pass = worst < tol;
  out.write_summary(json{{"max_rel_err", worst}, {"tolerance", tol}, {"pass", pass}});
  return pass ? RunStatus::ok : RunStatus::physics_error;
}

// ---------------------------------------------------------------- causality

RunStatus run_causality(const ScenarioConfig& cfg, OutputSink& out) {
  const json& ph = cfg.params.at("physics");
  const json& nu = cfg.params.at("numerics");
  const double eps0 = ph.at("eps0_tauc");
  const double p = ph.at("p_b");
  const double kappa_b = ph.at("kappa_b");
  const double t = ph.at("t_over_tauc");

  const ParticleSpec particle(eps0, p);
  const BarrierSpec barrier(particle.energy() - interior_energy_for_kappa(eps0, kappa_b), 1.0);
  const WavepacketSpec packet(p, ph.at("dz_over_b"), ph.at("z0_over_b"));

  const double p_half = nu.at("p_half_span");
  const double p_step = nu.at("p_step");
  const Index np = static_cast<Index>(std::ceil(2.0 * p_half / p_step)) + 1;
  const UniformGrid p_grid = UniformGrid::over(p - p_half, p + p_half, np);
  const UniformGrid z_grid = UniformGrid::over(nu.at("z_min"), nu.at("z_max"), nu.at("z_count"));

  CausalitySetup setup;
  setup.cutoff = double(nu.at("cutoff_over_dz")) * packet.width;
  setup.smoothing_width = packet.width / 20.0;
  setup.margin = setup.cutoff + double(nu.at("margin_beyond_front"));
  setup.p_grid = p_grid;
  setup.envelope_step = nu.at("envelope_step");

  const CausalityReport rep = causality_experiment(packet, particle, barrier, setup, z_grid, t);

  const BarrierSpec no_barrier(0.0, 1.0);
  const CausalityReport rep_free =
      causality_experiment(packet, particle, no_barrier, setup, z_grid, t);

  // Untruncated reference: the Gaussian has no compact support, so its
  // beyond-cone amplitude is reported rather than judged.
  const ComplexField untr =
      transmitted_pulse_spectral(packet, particle, barrier, z_grid, t, p_grid);
  double untr_beyond = 0.0;
  for (Index i = 0; i < z_grid.count; ++i)
    if (z_grid.point(i) > rep.region_start)
      untr_beyond = std::max(untr_beyond, std::abs(untr.values[i]));
  const double untr_ratio = untr_beyond / untr.values.abs().maxCoeff();

  out.write_curve("pulse.csv", "z_over_b", z_grid.points(), rep.field.values);
  const double threshold = nu.at("threshold");
  const bool pass = rep.leakage_ratio < threshold && rep_free.leakage_ratio < threshold;
  out.write_summary(json{
      {"leakage_ratio", rep.leakage_ratio},
      {"leakage_ratio_v0", rep_free.leakage_ratio},
      {"leakage_ratio_untruncated_reference", untr_ratio},
      {"front_position", rep.front_position},
      {"region_start", rep.region_start},
      {"margin", rep.margin},
      {"smoothing_width", rep.smoothing_width},
      {"cutoff", rep.cutoff},
      {"threshold", threshold},
      {"pass", pass},
  });
  out.note("causality: leakage " + format17(rep.leakage_ratio));
  return pass ? RunStatus::ok : RunStatus::physics_error;
}

// ---------------------------------------------------------------- weakdemo

RunStatus run_weakdemo(const ScenarioConfig& cfg, OutputSink& out) {
  const json& mt = cfg.params.at("meter");
  const json& nu = cfg.params.at("numerics");
  const json& dg = cfg.params.at("diagnostics");

  const double alpha = mt.at("alpha");
  const double sigma = mt.at("pointer_width");
  const WeakMeterSpec meter = WeakMeterSpec::two_level_anomalous(alpha, sigma);
  const Complex wv = weak_value(meter);

  const double sig_span = nu.at("grid_sigmas");
  const double lo = std::min(0.0, wv.real()) - sig_span * sigma;
  const double hi = std::max(1.0, wv.real()) + sig_span * sigma;
  const UniformGrid grid = UniformGrid::over(lo, hi, nu.at("grid_count"));
  const ComplexSamples state = pointer_final_state(meter, grid);
  const GaussianFit fit = gaussian_shift_fit(state, sigma);
  out.write_curve("pointer_state.csv", "tau_over_tauc", grid.points(), state.values);

  // Anomalous-alpha diagnostics in the weak and strong regimes.
  const double a2 = dg.at("anomalous_alpha");
  const double weak_sigma = double(dg.at("weak_sigma_factor")) * std::abs(a2);
  const WeakMeterSpec weak_meter = WeakMeterSpec::two_level_anomalous(a2, weak_sigma);
  const UniformGrid weak_grid =
      UniformGrid::over(-4.5 * weak_sigma, a2 + 4.5 * weak_sigma, 8001);
  const GaussianFit weak_fit =
      gaussian_shift_fit(pointer_final_state(weak_meter, weak_grid), weak_sigma);

  const double strong_sigma = dg.at("strong_sigma");
  const WeakMeterSpec strong_meter = WeakMeterSpec::two_level_anomalous(a2, strong_sigma);
  const UniformGrid strong_grid = UniformGrid::over(-4.5 * strong_sigma,
                                                    a2 + 4.5 * strong_sigma, 65537);
  const GaussianFit strong_fit =
      gaussian_shift_fit(pointer_final_state(strong_meter, strong_grid), strong_sigma);

  out.write_summary(json{
      {"weak_value_re", wv.real()},
      {"weak_value_im", wv.imag()},
      {"alpha_fit_re", fit.shift.real()},
      {"alpha_fit_im", fit.shift.imag()},
      {"fit_residual", fit.residual},
      {"postselection_probability", std::norm(meter.overlap())},
      {"anomalous",
       {{"alpha", a2},
        {"weak_value", weak_value(weak_meter).real()},
        {"weak_regime_sigma", weak_sigma},
        {"weak_regime_alpha_fit", weak_fit.shift.real()},
        {"weak_regime_residual", weak_fit.residual},
        {"strong_regime_sigma", strong_sigma},
        {"strong_regime_residual", strong_fit.residual}}},
  });
  out.note("weakdemo: alpha_fit " + format17(fit.shift.real()) + ", residual " +
           format17(fit.residual));
  return RunStatus::ok;
}

// ---------------------------------------------------------------- free-check

RunStatus run_free_check(const ScenarioConfig& cfg, OutputSink& out) {
  const json& ph = cfg.params.at("physics");
  const json& nu = cfg.params.at("numerics");
  const double eps0 = ph.at("eps0_tauc");
  const double eps_p = ph.at("epsp_tauc");
  const double t = ph.at("t_over_tauc");
  const ParticleSpec particle = ParticleSpec::from_energy(eps0, eps_p);
  const WavepacketSpec packet(particle.momentum, ph.at("dz_over_b"), ph.at("z0_over_b"));
  const double v0 = particle.group_velocity();

  const double sigma = packet.spectral_sigma();
  const double span = nu.at("p_span_sigmas");
  const UniformGrid p_grid = UniformGrid::over(particle.momentum - span * sigma,
                                               particle.momentum + span * sigma,
                                               nu.at("p_count"));
  const double halfspan = double(nu.at("z_halfspan_dz")) * packet.width;
  const Index zc = nu.at("z_count");

  // t = 0 reproduction of the initial packet.
  const UniformGrid z0_grid =
      UniformGrid::over(-packet.offset - halfspan, -packet.offset + halfspan, zc);
  const ComplexField at0 = free_pulse(packet, eps0, z0_grid, 0.0, p_grid);
  double linf0 = 0.0;
  for (Index i = 0; i < z0_grid.count; ++i) {
    const double z = z0_grid.point(i);
    const Complex exact =
        std::exp(kI * (packet.carrier_momentum * z)) * packet.envelope(z + packet.offset);
    linf0 = std::max(linf0, std::abs(at0.values[i] - exact));
  }
  linf0 /= at0.values.abs().maxCoeff();

  // Propagated pulse around the classical position.
  const double z_cl = -packet.offset + v0 * t;
  const UniformGrid z_grid = UniformGrid::over(z_cl - halfspan, z_cl + halfspan, zc);
  const ComplexField pulse = free_pulse(packet, eps0, z_grid, t, p_grid);
  out.write_curve("free_pulse.csv", "z_over_b", z_grid.points(), pulse.values);

  const double peak = locate_peak(pulse.samples());
  const Complex norm0 = trapezoid(z0_grid, at0.values.abs2().cast<Complex>());
  const Complex norm1 = trapezoid(z_grid, pulse.values.abs2().cast<Complex>());
  const double drift = std::abs(norm1.real() - norm0.real()) / norm0.real();

  out.write_summary(json{
      {"peak_z", peak},
      {"classical_peak_z", z_cl},
      {"peak_deviation_b", peak - z_cl},
      {"initial_reproduction_linf", linf0},
      {"norm_relative_drift", drift},
  });
  out.note("free-check: peak deviation " + format17(peak - z_cl) + " b");
  return RunStatus::ok;
}

}  // namespace

ScenarioConfig make_config(const std::string& scenario, const std::string& config_path,
                           const std::vector<std::string>& overrides,
                           const std::string& out_dir, bool quiet) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  cfg.params = scenario_defaults(scenario);
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw std::invalid_argument("cannot open config file '" + config_path + "'");
    json file_cfg = json::parse(is);
    deep_merge(cfg.params, file_cfg);
  }
  for (const std::string& ov : overrides) apply_override(cfg.params, ov);
  cfg.out_dir = out_dir;
  cfg.quiet = quiet;
  return cfg;
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string canon = config.scenario + "\n" + config.params.dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunStatus run_scenario(const ScenarioConfig& config) {
  OutputSink out;
  out.dir = config.out_dir;
  out.hash = config_hash(config);
  out.quiet = config.quiet;
  std::filesystem::create_directories(out.dir);

  RunStatus status;
  try {
    if (config.scenario == "fig1")
      status = run_fig1(config, out);
    else if (config.scenario == "eta-scan")
      status = run_eta_scan(config, out);
    else if (config.scenario == "sumrule")
      status = run_sumrule(config, out);
    else if (config.scenario == "causality")
      status = run_causality(config, out);
    else if (config.scenario == "weakdemo")
      status = run_weakdemo(config, out);
    else if (config.scenario == "free-check")
      status = run_free_check(config, out);
    else
      throw std::invalid_argument("unknown scenario '" + config.scenario + "'");
  } catch (const json::exception& e) {
    throw std::invalid_argument(e.what());
  }

  json manifest{{"scenario", config.scenario},
                {"params", config.params},
                {"config_hash", out.hash},
                {"outputs", out.files},
                {"exit_status", static_cast<int>(status)}};
  std::ofstream os(config.out_dir / "manifest.json", std::ios::binary);
  os << manifest.dump(2) << "\n";
  return status;
}

}  // namespace tunneltime
