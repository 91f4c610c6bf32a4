// isar - experiment runner for the ISAC SAR toolkit.
//
// Subcommands: irf, simulate, focus, nesz-sweep, ber-sweep, emulate, selftest.
// Every run reads a flat key=value config (plus --set overrides), writes its
// artifacts into --out, and drops a manifest with the fully resolved
// configuration so the run can be replayed byte-for-byte:
//   isar <cmd> --config out/manifest.txt --out replay
//
// Exit codes: 0 ok, 2 configuration/usage, 3 invalid input or processing,
// 4 file I/O, 1 internal.

#include "isar/isar.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <set>

namespace fs = std::filesystem;
using namespace isar;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

struct RunContext {
  KeyValueConfig cfg;
  fs::path out;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  // "# input-hash <name> <hex>" manifest comment lines.
  std::vector<std::pair<std::string, std::string>> input_hashes;
};

RunContext make_context(const CommonArgs& args, bool config_required = true) {
  RunContext ctx;
  if (!args.config_path.empty()) {
    ctx.cfg = KeyValueConfig::parse_file(args.config_path);
    ctx.input_hashes.emplace_back(args.config_path,
                                  fnv1a64_hex(read_file_bytes(args.config_path)));
  } else if (config_required) {
    throw ConfigError("--config is required for this subcommand");
  }
  ctx.cfg.apply_overrides(args.overrides);
  if (args.seed_given) ctx.cfg.set("seed", std::to_string(args.seed));
  ctx.cfg.set_default("seed", "1");
  ctx.seed = ctx.cfg.get_u64("seed");
  ctx.threads = args.threads;
  ctx.out = fs::path(args.out_dir);
  fs::create_directories(ctx.out);
  return ctx;
}

void write_manifest(const RunContext& ctx, const std::string& command) {
  std::string text;
  text += "# isar " + std::string(kVersion) + " " + command + " run manifest\n";
  text += "# replayable: pass this file back via --config\n";
  for (const auto& [name, hash] : ctx.input_hashes)
    text += "# input-hash " + name + " " + hash + "\n";
  text += ctx.cfg.serialize();
  write_file_bytes((ctx.out / "manifest.txt").string(), text);
}

// --------------------------------------------------------------------------
// Config block builders (defaults are materialized so the manifest is the
// complete resolved configuration).
// --------------------------------------------------------------------------

const std::vector<std::string> kOfdmKeys = {"ofdm.m_fft", "ofdm.delta_f_hz", "ofdm.m_active",
                                            "ofdm.cp_samples", "ofdm.constellation"};

void default_ofdm(KeyValueConfig& cfg) {
  cfg.set_default("ofdm.m_fft", "64");
  cfg.set_default("ofdm.delta_f_hz", "120e3");
  cfg.set_default("ofdm.m_active", "52");
  cfg.set_default("ofdm.cp_samples", "12");
  cfg.set_default("ofdm.constellation", "qpsk");
}

OfdmConfig ofdm_from(const KeyValueConfig& cfg) {
  OfdmConfig o;
  o.m_fft = cfg.get_u64("ofdm.m_fft");
  o.delta_f = cfg.get_double("ofdm.delta_f_hz");
  o.m_active = cfg.get_u64("ofdm.m_active");
  o.cp_samples = cfg.get_u64("ofdm.cp_samples");
  o.constellation = parse_constellation(cfg.get_string("ofdm.constellation"));
  o.validate();
  return o;
}

const std::vector<std::string> kLinkKeys = {
    "link.eirp_dbm",      "link.g_rx_dbi",           "link.noise_figure_db",
    "link.carrier_frequency_hz", "link.temperature_k", "link.directivity_loss_db",
    "link.allow_eirp_above_limit"};

void default_link(KeyValueConfig& cfg) {
  cfg.set_default("link.eirp_dbm", "23");
  cfg.set_default("link.g_rx_dbi", "10");
  cfg.set_default("link.noise_figure_db", "7");
  cfg.set_default("link.carrier_frequency_hz", "5.9e9");
  cfg.set_default("link.temperature_k", "290");
  cfg.set_default("link.directivity_loss_db", "0");
  cfg.set_default("link.allow_eirp_above_limit", "false");
}

LinkBudget link_from(const KeyValueConfig& cfg) {
  LinkBudget b;
  b.eirp_dbm = cfg.get_double("link.eirp_dbm");
  b.g_rx_dbi = cfg.get_double("link.g_rx_dbi");
  b.noise_figure_db = cfg.get_double("link.noise_figure_db");
  b.carrier_frequency = cfg.get_double("link.carrier_frequency_hz");
  b.temperature_k = cfg.get_double("link.temperature_k");
  b.directivity_loss_db = cfg.get_double("link.directivity_loss_db");
  b.allow_eirp_above_limit = cfg.get_bool("link.allow_eirp_above_limit");
  b.validate();
  return b;
}

const std::vector<std::string> kSnowKeys = {"snow.enabled", "snow.extinction_db_per_m",
                                            "snow.depth_m"};

void default_snow(KeyValueConfig& cfg) {
  cfg.set_default("snow.enabled", "false");
  cfg.set_default("snow.depth_m", "0");
  // snow.extinction_db_per_m deliberately has no default: snow scenarios
  // must state it.
}

SnowModel snow_from(const KeyValueConfig& cfg) {
  SnowModel s;
  s.enabled = cfg.get_bool("snow.enabled");
  if (s.enabled) {
    if (!cfg.has("snow.extinction_db_per_m"))
      throw ConfigError(
          "snow.enabled = true requires the config key snow.extinction_db_per_m (dB/m, one-way)");
    s.extinction_db_per_m = cfg.get_double("snow.extinction_db_per_m");
  } else if (cfg.has("snow.extinction_db_per_m")) {
    s.extinction_db_per_m = cfg.get_double("snow.extinction_db_per_m");
  }
  s.validate();
  return s;
}

ComplexSignal radar_pulse_from(const OfdmConfig& ofdm, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "radar-pulse"));
  std::vector<std::uint8_t> bits(ofdm.m_active * ofdm.constellation.bits_per_symbol());
  for (auto& b : bits) b = rng.next_bit();
  return ofdm_symbol_body(map_bits(bits, ofdm.constellation), ofdm);
}

CompressionMethod method_from_name(const std::string& name, double rzf_k) {
  if (name == "matched") return CompressionMethod::matched();
  if (name == "zf") return CompressionMethod::zero_forcing();
  if (name == "rzf") return CompressionMethod::regularized_zf(rzf_k);
  throw ConfigError("unknown compression method: " + name + " (matched|zf|rzf)");
}

// --------------------------------------------------------------------------
// irf: impulse responses of one OFDM symbol under each compression method
// --------------------------------------------------------------------------

int run_irf(const CommonArgs& args) {
  auto ctx = make_context(args);
  auto& cfg = ctx.cfg;
  cfg.set_default("irf.m_fft", "4096");
  cfg.set_default("irf.m_active", "1024");
  cfg.set_default("irf.delta_f_hz", "120e3");
  cfg.set_default("irf.constellations", "qpsk,qam256");
  cfg.set_default("irf.methods", "matched,zf");
  cfg.set_default("irf.delay_samples", "auto");
  cfg.set_default("irf.rzf_snr_db", "20");
  cfg.check_known({"seed", "irf.m_fft", "irf.m_active", "irf.delta_f_hz", "irf.constellations",
                   "irf.methods", "irf.delay_samples", "irf.rzf_snr_db"});

  OfdmConfig base;
  base.m_fft = cfg.get_u64("irf.m_fft");
  base.m_active = cfg.get_u64("irf.m_active");
  base.delta_f = cfg.get_double("irf.delta_f_hz");
  base.cp_samples = 0;
  base.validate();

  const std::size_t n = base.m_fft;
  const double fs = base.sample_rate();
  const double delay_samples = cfg.get_string("irf.delay_samples") == "auto"
                                   ? static_cast<double>(n / 2) + 0.25
                                   : cfg.get_double("irf.delay_samples");

  std::string metrics_csv =
      "constellation,method,pslr_db,islr_db,mainlobe_width_m,far_floor_db,peak_position_s\n";
  for (const auto& cname : cfg.get_list("irf.constellations")) {
    OfdmConfig ofdm = base;
    ofdm.constellation = parse_constellation(cname);
    const auto pulse = radar_pulse_from(ofdm, derive_seed(ctx.seed, cname));
    const auto echo = delayed_replica(pulse, delay_samples / fs, 0.0, n);

    RawDataMatrix rx(1, n);
    rx.sample_rate = fs;
    std::copy(echo.begin(), echo.end(), rx.row(0).begin());
    const ReferenceWaveform ref{pulse, ofdm.occupied_bandwidth(), true};

    for (const auto& mname : cfg.get_list("irf.methods")) {
      CompressionMethod method = CompressionMethod::matched();
      if (mname == "rzf") {
        const auto spec = reference_spectrum(ref, n);
        const auto mask = occupied_bins(n, fs, ref.occupied_bandwidth, ref.dc_null);
        method = CompressionMethod::regularized_zf(default_regularization(
            spec, mask, db_to_linear(cfg.get_double("irf.rzf_snr_db"))));
      } else {
        method = method_from_name(mname, 0.0);
      }
      const auto rc = range_compress(rx, ref, method, ctx.threads);
      const auto row = rc.row(0);
      const auto m = irf_metrics(row, fs, ofdm.occupied_bandwidth());

      std::string csv = "fast_time_s,range_m,magnitude_db\n";
      double peak = 0.0;
      for (const auto& v : row) peak = std::max(peak, std::abs(v));
      for (std::size_t i = 0; i < row.size(); ++i) {
        const double t = static_cast<double>(i) / fs;
        const double mag = std::abs(row[i]);
        const double db = mag > 0.0 ? 20.0 * std::log10(mag / peak) : -400.0;
        csv += format_double(t) + "," +
               format_double(t * constants::speed_of_light / 2.0) + "," + format_double(db) +
               "\n";
      }
      write_file_bytes((ctx.out / ("irf_" + cname + "_" + mname + ".csv")).string(), csv);

      metrics_csv += cname + "," + mname + "," + format_double(m.pslr_db) + "," +
                     format_double(m.islr_db) + "," + format_double(m.mainlobe_width_m) + "," +
                     format_double(m.far_floor_db) + "," + format_double(m.peak_position) + "\n";
      std::cout << cname << "/" << mname << ": pslr " << format_double(m.pslr_db)
                << " dB, far floor " << format_double(m.far_floor_db) << " dB\n";
    }
  }
  write_file_bytes((ctx.out / "metrics.csv").string(), metrics_csv);
  write_manifest(ctx, "irf");
  return 0;
}

// --------------------------------------------------------------------------
// simulate: raw echoes of configured point targets
// --------------------------------------------------------------------------

const std::vector<std::string> kTrajKeys = {
    "traj.file",         "traj.start_x_m",     "traj.start_y_m", "traj.start_z_m",
    "traj.velocity_x_mps", "traj.velocity_y_mps", "traj.velocity_z_mps",
    "traj.prf_hz",       "traj.n_pulses"};

void default_traj(KeyValueConfig& cfg) {
  cfg.set_default("traj.file", "");
  cfg.set_default("traj.start_x_m", "-12.8");
  cfg.set_default("traj.start_y_m", "0");
  cfg.set_default("traj.start_z_m", "150");
  cfg.set_default("traj.velocity_x_mps", "10");
  cfg.set_default("traj.velocity_y_mps", "0");
  cfg.set_default("traj.velocity_z_mps", "0");
  cfg.set_default("traj.prf_hz", "100");
  cfg.set_default("traj.n_pulses", "256");
}

Trajectory traj_from(const KeyValueConfig& cfg, RunContext& ctx) {
  const std::string file = cfg.get_string("traj.file");
  if (!file.empty()) {
    ctx.input_hashes.emplace_back(file, fnv1a64_hex(read_file_bytes(file)));
    return read_trajectory_csv(file);
  }
  return make_linear_trajectory(
      {cfg.get_double("traj.start_x_m"), cfg.get_double("traj.start_y_m"),
       cfg.get_double("traj.start_z_m")},
      {cfg.get_double("traj.velocity_x_mps"), cfg.get_double("traj.velocity_y_mps"),
       cfg.get_double("traj.velocity_z_mps")},
      cfg.get_double("traj.prf_hz"), cfg.get_u64("traj.n_pulses"));
}

std::vector<PointTarget> targets_from(KeyValueConfig& cfg) {
  if (cfg.keys_with_prefix("target.").empty()) {
    cfg.set_default("target.0.x_m", "0");
    cfg.set_default("target.0.y_m", "150");
    cfg.set_default("target.0.z_m", "0");
    cfg.set_default("target.0.rcs_m2", "1");
    cfg.set_default("target.0.depth_m", "0");
  }
  std::set<int> indices;
  for (const auto& key : cfg.keys_with_prefix("target.")) {
    const auto rest = key.substr(7);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) throw ConfigError("bad target key: " + key);
    indices.insert(std::stoi(rest.substr(0, dot)));
  }
  std::vector<PointTarget> targets;
  for (int i : indices) {
    const std::string p = "target." + std::to_string(i) + ".";
    PointTarget t;
    t.position = {cfg.get_double(p + "x_m"), cfg.get_double(p + "y_m"),
                  cfg.has(p + "z_m") ? cfg.get_double(p + "z_m") : 0.0};
    t.rcs = cfg.has(p + "rcs_m2") ? cfg.get_double(p + "rcs_m2") : 1.0;
    t.burial_depth = cfg.has(p + "depth_m") ? cfg.get_double(p + "depth_m") : 0.0;
    t.validate();
    targets.push_back(t);
  }
  return targets;
}

BistaticGeometry geometry_from(const KeyValueConfig& cfg, Trajectory traj) {
  if (cfg.get_bool("geom.bistatic"))
    return BistaticGeometry::bistatic({cfg.get_double("geom.tx_x_m"),
                                       cfg.get_double("geom.tx_y_m"),
                                       cfg.get_double("geom.tx_z_m")},
                                      std::move(traj));
  return BistaticGeometry::monostatic(std::move(traj));
}

void default_geom(KeyValueConfig& cfg) {
  cfg.set_default("geom.bistatic", "false");
  cfg.set_default("geom.tx_x_m", "0");
  cfg.set_default("geom.tx_y_m", "0");
  cfg.set_default("geom.tx_z_m", "4");
}

int run_simulate(const CommonArgs& args) {
  auto ctx = make_context(args);
  auto& cfg = ctx.cfg;
  default_ofdm(cfg);
  default_link(cfg);
  default_snow(cfg);
  default_traj(cfg);
  default_geom(cfg);
  cfg.set_default("sim.n_fast", "auto");
  cfg.set_default("sim.fast_time_origin_s", "auto");
  cfg.set_default("sim.noise", "true");

  std::vector<std::string> known = {"seed", "sim.n_fast", "sim.fast_time_origin_s", "sim.noise"};
  known.insert(known.end(), kOfdmKeys.begin(), kOfdmKeys.end());
  known.insert(known.end(), kLinkKeys.begin(), kLinkKeys.end());
  known.insert(known.end(), kSnowKeys.begin(), kSnowKeys.end());
  known.insert(known.end(), kTrajKeys.begin(), kTrajKeys.end());
  known.insert(known.end(), {"geom.bistatic", "geom.tx_x_m", "geom.tx_y_m", "geom.tx_z_m"});
  cfg.check_known(known, {"target."});

  const auto ofdm = ofdm_from(cfg);
  const auto budget = link_from(cfg);
  const auto snow = snow_from(cfg);
  auto traj = traj_from(cfg, ctx);
  const auto targets = targets_from(cfg);
  const auto geom = geometry_from(cfg, traj);
  const auto pulse = radar_pulse_from(ofdm, ctx.seed);
  const double fs = pulse.sample_rate;

  EchoSimConfig sim;
  sim.noise_enabled = cfg.get_bool("sim.noise");
  sim.seed = ctx.seed;
  sim.threads = ctx.threads;
  if (cfg.get_string("sim.n_fast") == "auto" ||
      cfg.get_string("sim.fast_time_origin_s") == "auto") {
    double t_min = 1e30, t_max = 0.0;
    for (std::size_t k = 0; k < geom.pulse_count(); ++k) {
      for (const auto& t : targets) {
        const double tau = geom.path_length(k, t.position) / constants::speed_of_light;
        t_min = std::min(t_min, tau);
        t_max = std::max(t_max, tau);
      }
    }
    sim.fast_time_origin = t_min - 32.0 / fs;
    const std::size_t span =
        static_cast<std::size_t>((t_max - t_min) * fs) + pulse.size() + 96;
    std::size_t n_fast = 64;
    while (n_fast < span) n_fast *= 2;
    sim.n_fast = n_fast;
  } else {
    sim.fast_time_origin = cfg.get_double("sim.fast_time_origin_s");
    sim.n_fast = cfg.get_u64("sim.n_fast");
  }

  const auto raw = simulate_echoes(pulse, geom, targets, budget, snow, sim);
  write_trajectory_csv((ctx.out / "trajectory.csv").string(), geom.rx_trajectory);
  write_isar((ctx.out / "raw.isar").string(), raw, "trajectory.csv");
  write_manifest(ctx, "simulate");
  std::cout << "simulated " << raw.n_pulses << " pulses x " << raw.n_fast << " samples at "
            << format_double(fs) << " Hz\n";
  return 0;
}

// --------------------------------------------------------------------------
// focus: (optionally compress and) back-project a data matrix
// --------------------------------------------------------------------------

int run_focus(const CommonArgs& args) {
  auto ctx = make_context(args);
  auto& cfg = ctx.cfg;
  default_ofdm(cfg);
  default_link(cfg);
  default_geom(cfg);
  cfg.set_default("focus.input", "");
  cfg.set_default("focus.interpolation", "sinc8");
  cfg.set_default("compression.method", "matched");
  cfg.set_default("compression.rzf_snr_db", "20");
  cfg.set_default("grid.center_x_m", "0");
  cfg.set_default("grid.center_y_m", "150");
  cfg.set_default("grid.center_z_m", "0");
  cfg.set_default("grid.nx", "65");
  cfg.set_default("grid.ny", "65");
  cfg.set_default("grid.dx_m", "1");
  cfg.set_default("grid.dy_m", "1");
  cfg.set_default("pgm.dynamic_db", "60");

  std::vector<std::string> known = {"seed",
                                    "focus.input",
                                    "focus.interpolation",
                                    "compression.method",
                                    "compression.rzf_snr_db",
                                    "grid.center_x_m",
                                    "grid.center_y_m",
                                    "grid.center_z_m",
                                    "grid.nx",
                                    "grid.ny",
                                    "grid.dx_m",
                                    "grid.dy_m",
                                    "pgm.dynamic_db"};
  known.insert(known.end(), kOfdmKeys.begin(), kOfdmKeys.end());
  known.insert(known.end(), kLinkKeys.begin(), kLinkKeys.end());
  known.insert(known.end(), {"geom.bistatic", "geom.tx_x_m", "geom.tx_y_m", "geom.tx_z_m"});
  cfg.check_known(known);

  const std::string input = cfg.get_string("focus.input");
  if (input.empty()) throw ConfigError("focus.input must point to an .isar file");
  ctx.input_hashes.emplace_back(input, fnv1a64_hex(read_file_bytes(input)));

  std::string traj_name;
  auto data = read_isar(input, &traj_name);
  if (traj_name.empty() || traj_name == "-")
    throw ConfigError("input sidecar does not reference a trajectory file");
  fs::path traj_path(traj_name);
  if (traj_path.is_relative()) traj_path = fs::path(input).parent_path() / traj_path;
  auto traj = read_trajectory_csv(traj_path.string());
  data.slow_times = traj.slow_times;
  ctx.input_hashes.emplace_back(traj_path.string(),
                                fnv1a64_hex(read_file_bytes(traj_path.string())));

  const auto ofdm = ofdm_from(cfg);
  const auto budget = link_from(cfg);
  const auto geom = geometry_from(cfg, traj);

  if (!data.range_compressed) {
    const auto pulse = radar_pulse_from(ofdm, ctx.seed);
    const ReferenceWaveform ref{pulse, ofdm.occupied_bandwidth(), true};
    CompressionMethod method = CompressionMethod::matched();
    const std::string mname = cfg.get_string("compression.method");
    if (mname == "rzf") {
      const auto spec = reference_spectrum(ref, data.n_fast);
      const auto mask =
          occupied_bins(data.n_fast, data.sample_rate, ref.occupied_bandwidth, ref.dc_null);
      method = CompressionMethod::regularized_zf(default_regularization(
          spec, mask, db_to_linear(cfg.get_double("compression.rzf_snr_db"))));
    } else {
      method = method_from_name(mname, 0.0);
    }
    data = range_compress(data, ref, method, ctx.threads);
    write_isar((ctx.out / "rc.isar").string(), data, traj_name);
  }

  SceneGrid grid;
  grid.nx = cfg.get_u64("grid.nx");
  grid.ny = cfg.get_u64("grid.ny");
  grid.dx = cfg.get_double("grid.dx_m");
  grid.dy = cfg.get_double("grid.dy_m");
  grid.origin = {cfg.get_double("grid.center_x_m") -
                     grid.dx * static_cast<double>(grid.nx / 2),
                 cfg.get_double("grid.center_y_m") -
                     grid.dy * static_cast<double>(grid.ny / 2),
                 cfg.get_double("grid.center_z_m")};
  grid.validate();

  const std::string iname = cfg.get_string("focus.interpolation");
  Interpolation interp;
  if (iname == "sinc8")
    interp = Interpolation::WindowedSinc8;
  else if (iname == "nearest")
    interp = Interpolation::NearestNeighbor;
  else
    throw ConfigError("unknown focus.interpolation: " + iname + " (sinc8|nearest)");

  const auto img =
      tdbp_focus(data, geom, grid, budget.carrier_frequency, interp, ctx.threads);
  write_image_pgm((ctx.out / "image.pgm").string(), img, cfg.get_double("pgm.dynamic_db"));
  write_image_csv((ctx.out / "image.csv").string(), img);
  write_image_meta((ctx.out / "image.meta").string(), img);
  write_manifest(ctx, "focus");
  std::cout << "focused " << grid.nx << "x" << grid.ny << " pixels from " << data.n_pulses
            << " pulses (" << img.n_clipped << " clipped)\n";
  return 0;
}

// --------------------------------------------------------------------------
// nesz-sweep / ber-sweep
// --------------------------------------------------------------------------

int run_sweep(const CommonArgs& args, bool with_ber) {
  auto ctx = make_context(args);
  auto& cfg = ctx.cfg;
  default_ofdm(cfg);
  default_link(cfg);
  default_snow(cfg);
  cfg.set_default("sweep.variable", "eirp");
  cfg.set_default("sweep.start", "0");
  cfg.set_default("sweep.stop", "23");
  cfg.set_default("sweep.step", "1");
  cfg.set_default("scene.altitude_m", "100");
  cfg.set_default("scene.off_nadir_deg", "45");
  cfg.set_default("pulse.mode", "symbol");
  cfg.set_default("pulse.n_symbols", "14");
  cfg.set_default("pulse.t_symbol_s", "auto");
  cfg.set_default("ntau", "1000");
  cfg.set_default("res.aperture_m", "10");
  if (with_ber) cfg.set_default("ber.n_bits", "1000000");

  std::vector<std::string> known = {"seed",          "sweep.variable",  "sweep.start",
                                    "sweep.stop",    "sweep.step",      "scene.altitude_m",
                                    "scene.off_nadir_deg", "pulse.mode", "pulse.n_symbols",
                                    "pulse.t_symbol_s", "ntau",         "res.aperture_m"};
  if (with_ber) known.push_back("ber.n_bits");
  known.insert(known.end(), kOfdmKeys.begin(), kOfdmKeys.end());
  known.insert(known.end(), kLinkKeys.begin(), kLinkKeys.end());
  known.insert(known.end(), kSnowKeys.begin(), kSnowKeys.end());
  cfg.check_known(known);

  const auto ofdm = ofdm_from(cfg);

  KpiSweepSpec spec;
  spec.variable = parse_sweep_variable(cfg.get_string("sweep.variable"));
  spec.start = cfg.get_double("sweep.start");
  spec.stop = cfg.get_double("sweep.stop");
  spec.step = cfg.get_double("sweep.step");
  spec.budget = link_from(cfg);
  spec.snow = snow_from(cfg);
  spec.snow_depth = cfg.get_double("snow.depth_m");
  spec.altitude = cfg.get_double("scene.altitude_m");
  spec.off_nadir_deg = cfg.get_double("scene.off_nadir_deg");
  spec.n_tau = cfg.get_u64("ntau");

  const double t_symbol = cfg.get_string("pulse.t_symbol_s") == "auto"
                              ? ofdm.pulse_duration()
                              : cfg.get_double("pulse.t_symbol_s");
  spec.pulse = cfg.get_string("pulse.mode") == "frame"
                   ? PulseDefinition::frame_based(t_symbol, cfg.get_u64("pulse.n_symbols"))
                   : PulseDefinition::symbol_based(t_symbol);

  spec.res = resolutions(ofdm.occupied_bandwidth(), spec.budget.wavelength(),
                         cfg.get_double("res.aperture_m"), spec.slant_range(spec.altitude));

  const std::uint64_t n_bits = with_ber ? cfg.get_u64("ber.n_bits") : 0;
  if (with_ber && n_bits < 100000)
    std::cerr << "warning: ber.n_bits < 1e5 gives unstable estimates\n";
  const auto points = kpi_sweep(spec, ofdm, n_bits, ctx.seed, ctx.threads);

  std::string csv = "variable,value,nesz_db,ber,ber_ci_low,ber_ci_high\n";
  const std::string vname = sweep_variable_name(spec.variable);
  for (const auto& p : points) {
    csv += vname + "," + format_double(p.value) + "," + format_double(p.nesz_db) + "," +
           format_double(p.ber) + "," + format_double(p.ber_ci_low) + "," +
           format_double(p.ber_ci_high) + "\n";
  }
  write_file_bytes((ctx.out / "sweep.csv").string(), csv);
  write_manifest(ctx, with_ber ? "ber-sweep" : "nesz-sweep");
  std::cout << "swept " << points.size() << " values of " << vname << "\n";
  return 0;
}

// --------------------------------------------------------------------------
// emulate: OFDM acquisition from chirp-compressed data
// --------------------------------------------------------------------------

int run_emulate(const CommonArgs& args) {
  auto ctx = make_context(args);
  auto& cfg = ctx.cfg;
  default_ofdm(cfg);
  cfg.set_default("emulate.input", "");
  cfg.set_default("emulate.target_prf_hz", "0");
  std::vector<std::string> known = {"seed", "emulate.input", "emulate.target_prf_hz"};
  known.insert(known.end(), kOfdmKeys.begin(), kOfdmKeys.end());
  cfg.check_known(known);

  const std::string input = cfg.get_string("emulate.input");
  if (input.empty()) throw ConfigError("emulate.input must point to an .isar file");
  ctx.input_hashes.emplace_back(input, fnv1a64_hex(read_file_bytes(input)));

  std::string traj_name;
  auto data = read_isar(input, &traj_name);

  const auto ofdm = ofdm_from(cfg);
  OfdmConfig pulse_cfg = ofdm;
  // The emulation pulse must live on the data's grid.
  pulse_cfg.delta_f = data.sample_rate / static_cast<double>(pulse_cfg.m_fft);
  const auto pulse = radar_pulse_from(pulse_cfg, ctx.seed);

  const double target_prf = cfg.get_double("emulate.target_prf_hz");
  std::string out_traj_name = traj_name;
  if (target_prf > 0.0) {
    if (traj_name.empty() || traj_name == "-")
      throw ConfigError("emulate.target_prf_hz needs a trajectory in the input sidecar");
    fs::path traj_path(traj_name);
    if (traj_path.is_relative()) traj_path = fs::path(input).parent_path() / traj_path;
    auto traj = read_trajectory_csv(traj_path.string());
    data.slow_times = traj.slow_times;
    auto [dec, dec_traj] = adapt_prf(data, traj, target_prf);
    data = std::move(dec);
    write_trajectory_csv((ctx.out / "trajectory.csv").string(), dec_traj);
    out_traj_name = "trajectory.csv";
  }

  const auto emulated = emulate_ofdm_from_chirp(data, pulse, ctx.threads);
  write_isar((ctx.out / "emulated.isar").string(), emulated, out_traj_name);
  write_manifest(ctx, "emulate");
  std::cout << "emulated " << emulated.n_pulses << " pulses onto the OFDM pulse ("
            << format_double(pulse_cfg.delta_f) << " Hz spacing)\n";
  return 0;
}

// --------------------------------------------------------------------------
// import: CSV I/Q dump -> .isar container
// --------------------------------------------------------------------------

int run_import(const CommonArgs& args) {
  auto ctx = make_context(args);
  auto& cfg = ctx.cfg;
  cfg.set_default("import.input", "");
  cfg.set_default("import.n_fast", "0");
  cfg.set_default("import.sample_rate_hz", "0");
  cfg.set_default("import.fast_time_origin_s", "0");
  cfg.set_default("import.range_compressed", "false");
  cfg.set_default("import.trajectory", "");
  cfg.check_known({"seed", "import.input", "import.n_fast", "import.sample_rate_hz",
                   "import.fast_time_origin_s", "import.range_compressed",
                   "import.trajectory"});

  const std::string input = cfg.get_string("import.input");
  if (input.empty()) throw ConfigError("import.input must point to a CSV I/Q dump");
  const std::size_t n_fast = cfg.get_u64("import.n_fast");
  if (n_fast == 0) throw ConfigError("import.n_fast (samples per pulse) must be > 0");
  const double fs = cfg.get_double("import.sample_rate_hz");
  if (fs <= 0.0) throw ConfigError("import.sample_rate_hz must be > 0");
  ctx.input_hashes.emplace_back(input, fnv1a64_hex(read_file_bytes(input)));

  // Dump format: header "i,q", then one sample per line in pulse-major
  // order; the line count must be a whole number of pulses.
  std::ifstream in(input);
  if (!in) throw IoError("cannot open CSV dump: " + input);
  std::string line;
  if (!std::getline(in, line) || line.rfind("i,q", 0) != 0)
    throw IoError("CSV dump must start with an 'i,q' header: " + input);
  std::vector<Complex> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError(input + ":" + std::to_string(line_no) + ": expected i,q");
    samples.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  if (samples.empty() || samples.size() % n_fast != 0)
    throw std::invalid_argument("import: sample count " + std::to_string(samples.size()) +
                                " is not a whole number of " + std::to_string(n_fast) +
                                "-sample pulses");

  RawDataMatrix m(samples.size() / n_fast, n_fast);
  m.data = std::move(samples);
  m.sample_rate = fs;
  m.fast_time_origin = cfg.get_double("import.fast_time_origin_s");
  m.range_compressed = cfg.get_bool("import.range_compressed");

  const std::string traj = cfg.get_string("import.trajectory");
  write_isar((ctx.out / "imported.isar").string(), m, traj.empty() ? "-" : traj);
  write_manifest(ctx, "import");
  std::cout << "imported " << m.n_pulses << " pulses x " << m.n_fast << " samples\n";
  return 0;
}

// --------------------------------------------------------------------------
// selftest: quick invariants, no config needed
// --------------------------------------------------------------------------

int run_selftest(const CommonArgs& args) {
  (void)args;
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "ok " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  {
    const Constellation c{ConstellationOrder::Qam64};
    const auto alphabet = constellation_alphabet(c);
    double e = 0.0;
    for (const auto& s : alphabet) e += std::norm(s);
    check("constellation energy", std::abs(e / 64.0 - 1.0) < 1e-12);

    std::vector<std::uint8_t> bits{1, 0, 1, 1, 0, 1};
    check("map/demap round trip", demap_symbols(map_bits(bits, c), c) == bits);
  }
  {
    const auto cfg = OfdmConfig::sub6_default();
    Rng rng(1);
    std::vector<std::uint8_t> bits(cfg.m_active * 2);
    for (auto& b : bits) b = rng.next_bit();
    const auto sig = ofdm_modulate(map_bits(bits, cfg.constellation), cfg);
    bool cp_ok = true;
    for (std::size_t i = 0; i < cfg.cp_samples; ++i)
      cp_ok = cp_ok && sig.samples[i] == sig.samples[cfg.m_fft + i];
    check("cyclic prefix", cp_ok);
  }
  check("unambiguous range", std::abs(unambiguous_range(125e3) - 1199.17) < 0.01);
  {
    const ChirpConfig cc{40e6, 10e-6, 50e6};
    const auto chirp = generate_chirp(cc);
    bool mod_ok = chirp.size() == 500;
    for (const auto& s : chirp.samples) mod_ok = mod_ok && std::abs(std::abs(s) - 1.0) < 1e-12;
    check("chirp modulus", mod_ok);
  }
  {
    auto traj = make_linear_trajectory({0, 0, 100}, {0, 0, 0}, 1e3, 2);
    const auto geom = BistaticGeometry::monostatic(traj);
    check("vertical range", std::abs(range_history(geom, {0, 0, 0})[0] - 200.0) < 1e-9);
  }
  {
    // Tiny end-to-end: echo, matched filter, peak at the true delay.
    const auto cfg = OfdmConfig::sub6_default();
    Rng rng(2);
    std::vector<std::uint8_t> bits(cfg.m_active * 2);
    for (auto& b : bits) b = rng.next_bit();
    const auto pulse = ofdm_symbol_body(map_bits(bits, cfg.constellation), cfg);
    auto traj = make_linear_trajectory({0, 0, 100}, {0, 0, 0}, 1e3, 1);
    const auto geom = BistaticGeometry::monostatic(traj);
    LinkBudget budget;
    SnowModel snow;
    EchoSimConfig sim;
    sim.n_fast = 128;
    sim.noise_enabled = false;
    const auto rx = simulate_echoes(pulse, geom, {{{0, 0, 0}, 1.0, 0.0}}, budget, snow, sim);
    const auto rc = range_compress(rx, ReferenceWaveform{pulse, cfg.occupied_bandwidth(), true},
                                   CompressionMethod::matched());
    const auto row = rc.row(0);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
      if (std::abs(row[i]) > std::abs(row[peak])) peak = i;
    const double tau = 200.0 / constants::speed_of_light;
    check("echo peak at delay", std::abs(rc.fast_time(peak) - tau) <= 0.5 / rc.sample_rate);
  }
  {
    Rng a(42), b(42);
    bool same = true;
    for (int i = 0; i < 100; ++i) same = same && a.next_u64() == b.next_u64();
    check("rng determinism", same);
  }
  return failures == 0 ? 0 : 1;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SingularSpectrumError& e) {
    std::cerr << "processing error: " << e.what() << "\n";
    return 3;
  } catch (const UnsupportedOperationError& e) {
    std::cerr << "unsupported operation: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISAC SAR toolkit: OFDM/chirp waveforms, echo simulation, range "
               "compression, back projection, NESZ/BER sweeps"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub, bool config_expected = true) {
    if (config_expected)
      sub->add_option("--config", args.config_path, "scenario config file (key = value)");
    sub->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    sub->add_option("--set", args.overrides, "override config entries, key=value")
        ->take_all();
    sub->add_option("--threads", args.threads, "worker threads, 0 = all cores")
        ->capture_default_str();
    sub->add_option("--seed", args.seed, "override the top-level seed")
        ->each([&](const std::string&) { args.seed_given = true; });
  };

  auto* irf = app.add_subcommand("irf", "impulse responses of one OFDM symbol");
  add_common(irf);
  auto* simulate = app.add_subcommand("simulate", "simulate raw point-target echoes");
  add_common(simulate);
  auto* focus = app.add_subcommand("focus", "range-compress and back-project a data matrix");
  add_common(focus);
  auto* nesz = app.add_subcommand("nesz-sweep", "NESZ across a swept parameter");
  add_common(nesz);
  auto* ber = app.add_subcommand("ber-sweep", "NESZ and BER across a swept parameter");
  add_common(ber);
  auto* emulate = app.add_subcommand("emulate", "emulate an OFDM acquisition from chirp data");
  add_common(emulate);
  auto* import = app.add_subcommand("import", "convert a CSV I/Q dump into an .isar container");
  add_common(import);
  auto* selftest = app.add_subcommand("selftest", "run built-in smoke checks");
  add_common(selftest, false);

  CLI11_PARSE(app, argc, argv);

  if (irf->parsed()) return guarded([&] { return run_irf(args); });
  if (simulate->parsed()) return guarded([&] { return run_simulate(args); });
  if (focus->parsed()) return guarded([&] { return run_focus(args); });
  if (nesz->parsed()) return guarded([&] { return run_sweep(args, false); });
  if (ber->parsed()) return guarded([&] { return run_sweep(args, true); });
  if (emulate->parsed()) return guarded([&] { return run_emulate(args); });
  if (import->parsed()) return guarded([&] { return run_import(args); });
  if (selftest->parsed()) return guarded([&] { return run_selftest(args); });
  return 1;
}
