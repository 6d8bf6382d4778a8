// Command-line front end for the sesn forecasting toolkit.
//
// Commands cover the full pipeline: make-demo, fit-mean, select-knots,
// fit-cov, cv, train-esn, forecast, calibrate, evaluate,
// baseline <method>, lorenz-study, power. Every command reads its declared
// inputs, writes its declared outputs plus a run manifest, and exits
// nonzero with a single machine-parsable "error:<kind>: ..." line on
// failure. All randomness flows from [run] seed.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sesn/sesn.hpp"

namespace fs = std::filesystem;
using namespace sesn;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "configuration file")->required();
  cmd->add_option("--set", args.overrides,
                  "override a config key, e.g. --set forecast.ensemble=10");
  cmd->add_option("--seed", args.seed, "override [run] seed");
}

Config load_config(const CommonArgs& args) {
  Config cfg = Config::parse_file(args.config_path);
  for (const auto& ov : args.overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw configuration_error("--set expects section.key=value, got '" + ov + "'");
    cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
  }
  if (args.seed) cfg.set("run.seed", std::to_string(*args.seed));
  return cfg;
}

std::uint64_t config_hash(const Config& cfg) { return fnv1a(cfg.serialize()); }

struct Paths {
  std::string outdir;
  std::string harmonics() const { return outdir + "/harmonics.csv"; }
  std::string residuals() const { return outdir + "/residuals.stf"; }
  std::string knots() const { return outdir + "/knots.json"; }
  std::string covariance() const { return outdir + "/covariance.txt"; }
  std::string cv_results() const { return outdir + "/cv_results.csv"; }
  std::string best_spec() const { return outdir + "/best_esn.ini"; }
  std::string model() const { return outdir + "/model.esnm"; }
  std::string knot_forecast(int h) const {
    return outdir + "/forecast_knots_h" + std::to_string(h) + ".stf";
  }
  std::string full_forecast(int h) const {
    return outdir + "/forecast_full_h" + std::to_string(h) + ".stf";
  }
  std::string baseline_forecast(const std::string& method, int h) const {
    return outdir + "/baseline_" + method + "_h" + std::to_string(h) + ".stf";
  }
  std::string quantiles() const { return outdir + "/quantiles.csv"; }
  std::string metrics() const { return outdir + "/metrics.csv"; }
  std::string power_metrics() const { return outdir + "/power.csv"; }
  std::string cache_dir() const { return outdir + "/cache"; }
};

SpaceTimeField load_wind(const ExperimentConfig& ec) {
  if (ec.wind_path.empty()) throw configuration_error("data.wind is not set");
  SpaceTimeField wind = read_space_time_file(ec.wind_path);
  if (wind.start + wind.n_times() <= ec.calib_end)
    throw configuration_error("record ends before splits.calib_end; nothing left to forecast");
  return wind;
}

/// Merges a best-spec fragment (an [esn] section) over the config's spec.
EsnSpec esn_spec_with_fragment(const ExperimentConfig& ec, const std::string& spec_path) {
  if (spec_path.empty()) return ec.esn;
  const Config frag = Config::parse_file(spec_path);
  EsnSpec s = ec.esn;
  s.n_h = static_cast<int>(frag.get_int("esn.n_h", s.n_h));
  s.m = static_cast<int>(frag.get_int("esn.m", s.m));
  s.phi = frag.get_double("esn.phi", s.phi);
  s.delta = frag.get_double("esn.delta", s.delta);
  s.lambda = frag.get_double("esn.lambda", s.lambda);
  s.a_w = frag.get_double("esn.a_w", s.a_w);
  s.a_u = frag.get_double("esn.a_u", s.a_u);
  s.pi_w = frag.get_double("esn.pi_w", s.pi_w);
  s.pi_u = frag.get_double("esn.pi_u", s.pi_u);
  return s;
}

Eigen::MatrixXd knot_values(const SpaceTimeField& residuals, const KnotSet& knots) {
  Eigen::MatrixXd y(residuals.n_times(), static_cast<Eigen::Index>(knots.size()));
  for (std::size_t j = 0; j < knots.size(); ++j)
    y.col(static_cast<Eigen::Index>(j)) = residuals.values.col(knots.indices[j]);
  return y;
}

SpaceTimeField make_field(std::vector<Location> locs, std::int64_t start, Eigen::MatrixXd v) {
  return SpaceTimeField(std::move(locs), start, std::move(v));
}

/// Kriging weights with an on-disk cache keyed by (locations, knots,
/// covariance model).
KrigingWeights cached_kriging_weights(const Paths& paths, const SpaceTimeField& residuals,
                                      const std::vector<Location>& knot_locs,
                                      const CovarianceModel& cov) {
  std::ostringstream key;
  for (const auto& l : residuals.locations) key << l.id << "," << l.x << "," << l.y << ";";
  key << "|";
  for (const auto& l : knot_locs) key << l.id << ";";
  key << "|" << cov.bandwidth;
  for (const auto& c : cov.components)
    key << "|" << c.cx << "," << c.cy << "," << c.sill << "," << c.smoothness << ","
        << c.kernel(0, 0) << "," << c.kernel(0, 1) << "," << c.kernel(1, 1) << "," << c.nugget;
  const std::uint64_t h = fnv1a(key.str());
  const std::string cache = paths.cache_dir() + "/kw_" + std::to_string(h) + ".bin";

  if (fs::exists(cache)) {
    std::ifstream is(cache, std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    std::uint64_t rows = 0, cols = 0;
    is.read(reinterpret_cast<char*>(&rows), 8);
    is.read(reinterpret_cast<char*>(&cols), 8);
    KrigingWeights w;
    w.weights.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    is.read(reinterpret_cast<char*>(w.weights.data()),
            static_cast<std::streamsize>(rows * cols * sizeof(double)));
    if (is) return w;
  }

  const KrigingWeights w = kriging_weights(residuals.locations, knot_locs, cov);
  fs::create_directories(paths.cache_dir());
  std::ofstream os(cache, std::ios::binary);
  os.write("KWC1", 4);
  const std::uint64_t rows = static_cast<std::uint64_t>(w.weights.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(w.weights.cols());
  os.write(reinterpret_cast<const char*>(&rows), 8);
  os.write(reinterpret_cast<const char*>(&cols), 8);
  os.write(reinterpret_cast<const char*>(w.weights.data()),
           static_cast<std::streamsize>(rows * cols * sizeof(double)));
  return w;
}

void append_metric(std::vector<std::string>& rows, const std::string& metric,
                   const std::string& method, int horizon, const std::string& level,
                   double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  rows.push_back(metric + "," + method + "," + std::to_string(horizon) + "," + level + "," + buf);
}

void write_metrics(const std::string& path, const std::vector<std::string>& rows) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  os << "metric,method,horizon,level,value\n";
  for (const auto& r : rows) os << r << "\n";
}

// ---------------------------------------------------------------------------
// commands

int cmd_make_demo(const std::string& out, std::uint64_t seed, int side, int hours) {
  DemoOptions opt;
  opt.seed = seed;
  opt.grid_side = side;
  opt.n_times = hours;
  fs::create_directories(out);

  const SpaceTimeField wind = generate_demo_field(opt);
  const std::string wind_path = out + "/wind.stf";
  write_space_time_file(wind_path, wind);

  std::ofstream cfg_os(out + "/demo.ini");
  cfg_os << demo_config_text(wind_path, out + "/pipeline", opt, out + "/turbines.csv");
  cfg_os.close();

  // synthetic example curves; point lists sketch the usual S-shaped ramp
  PowerCurve a;
  a.cut_in = 3.0;
  a.rated_speed = 12.0;
  a.cut_out = 25.0;
  a.rated_power = 3300.0;
  a.points = {{3, 0}, {4, 90}, {5, 260}, {6, 530}, {7, 920}, {8, 1450}, {9, 2080}, {10, 2700}, {11, 3150}, {12, 3300}};
  write_power_curve_file(out + "/power_curve_a.csv", a);

  PowerCurve b;
  b.cut_in = 3.5;
  b.rated_speed = 13.0;
  b.cut_out = 25.0;
  b.rated_power = 2750.0;
  b.points = {{3.5, 0}, {5, 180}, {6.5, 520}, {8, 1080}, {9.5, 1750}, {11, 2380}, {12, 2650}, {13, 2750}};
  write_power_curve_file(out + "/power_curve_b.csv", b);

  // turbines at the windiest demo locations
  const Eigen::VectorXd means = wind.values.colwise().mean();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(wind.n_locations()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return means(x) > means(y); });
  std::ofstream reg(out + "/turbines.csv");
  reg << "location_id,hub_height,alpha,curve_file\n";
  for (int i = 0; i < 4 && i < wind.n_locations(); ++i) {
    const auto& loc = wind.locations[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    reg << loc.id << "," << (i % 2 == 0 ? 84 : 75) << "," << (1.0 / 7.0) << ","
        << (i % 2 == 0 ? "power_curve_a.csv" : "power_curve_b.csv") << "\n";
  }
  reg.close();

  write_manifest(out, "make-demo", fnv1a("make-demo:" + std::to_string(seed)), seed, {},
                 {wind_path, out + "/demo.ini", out + "/turbines.csv"}, kVersion);
  std::cout << "demo dataset: " << wind.n_locations() << " locations x " << wind.n_times()
            << " hours -> " << wind_path << "\n";
  std::cout << "config: " << out << "/demo.ini\n";
  return 0;
}

int cmd_fit_mean(const Config& cfg) {
  const ExperimentConfig ec = ExperimentConfig::from(cfg);
  const Paths paths{ec.outdir};
  fs::create_directories(ec.outdir);

  const SpaceTimeField wind = load_wind(ec);
  const SpaceTimeField training = wind.slice_times(wind.start, ec.calib_end);
  const HarmonicModel model = fit_harmonics(training, ec.periods);
  write_harmonics_file(paths.harmonics(), model);

  const SpaceTimeField residuals = detrend(wind, model);
  write_space_time_file(paths.residuals(), residuals);

  write_manifest(ec.outdir, "fit-mean", config_hash(cfg), ec.seed, {ec.wind_path},
                 {paths.harmonics(), paths.residuals()}, kVersion);
  std::cout << "fitted " << ec.periods.size() << " harmonics at " << wind.n_locations()
            << " locations; residuals -> " << paths.residuals() << "\n";
  return 0;
}

int cmd_select_knots(const Config& cfg) {
  const ExperimentConfig ec = ExperimentConfig::from(cfg);
  const Paths paths{ec.outdir};
  fs::create_directories(ec.outdir);

  const SpaceTimeField wind = load_wind(ec);
  const SpaceTimeField training = wind.slice_times(wind.start, ec.calib_end);
  const KnotSet knots =
      select_knots(training, ec.knot_grid_step, ec.knot_speed_threshold, ec.knot_min_sep);
  write_knots_file(paths.knots(), knots, wind);

  std::size_t high = 0;
  for (auto t : knots.tags) high += (t == KnotTag::HighWind) ? 1 : 0;
  write_manifest(ec.outdir, "select-knots", config_hash(cfg), ec.seed, {ec.wind_path},
                 {paths.knots()}, kVersion);
  std::cout << "selected " << knots.size() << " knots (" << knots.size() - high << " grid, "
            << high << " high-wind) -> " << paths.knots() << "\n";
  return 0;
}

int cmd_fit_cov(const Config& cfg) {
  const ExperimentConfig ec = ExperimentConfig::from(cfg);
  const Paths paths{ec.outdir};
  const SpaceTimeField residuals = read_space_time_file(paths.residuals());
  const SpaceTimeField calib = residuals.slice_times(ec.train_end, ec.calib_end);

  // center grid over the bounding box, keeping centers with enough
  // neighbors for a local fit
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& l : calib.locations) {
    xmin = std::min(xmin, l.x);
    xmax = std::max(xmax, l.x);
    ymin = std::min(ymin, l.y);
    ymax = std::max(ymax, l.y);
  }
  CovarianceFitOptions opt;
  opt.seed = ec.seed;
  opt.restarts = ec.cov_restarts;
  std::vector<Location> centers;
  const int nx = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / ec.cov_center_step)));
  const int ny = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / ec.cov_center_step)));
  int dropped = 0;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      Location c;
      c.id = "C" + std::to_string(ix) + "_" + std::to_string(iy);
      c.x = xmin + (ix + 0.5) * ec.cov_center_step;
      c.y = ymin + (iy + 0.5) * ec.cov_center_step;
      std::size_t near = 0;
      for (const auto& l : calib.locations) {
        const double dx = l.x - c.x, dy = l.y - c.y;
        if (dx * dx + dy * dy <= ec.cov_radius * ec.cov_radius) ++near;
      }
      if (near >= opt.min_neighbors)
        centers.push_back(c);
      else
        ++dropped;
    }
  if (centers.empty())
    throw configuration_error("fit-cov: no center has enough neighbors; increase "
                              "covariance.radius or decrease covariance.center_step");
  if (dropped > 0)
    std::cerr << "warning: dropped " << dropped << " sparse covariance centers\n";

  const CovarianceModel model =
      fit_covariance(calib, centers, ec.cov_radius, ec.cov_bandwidth, opt);
  write_covariance_file(paths.covariance(), model);

  int failed = 0;
  for (const auto& c : model.components) failed += c.converged ? 0 : 1;
  if (failed > 0)
    std::cerr << "warning: " << failed
              << " centers fell back to neighbor-averaged parameters\n";
  write_manifest(ec.outdir, "fit-cov", config_hash(cfg), ec.seed, {paths.residuals()},
                 {paths.covariance()}, kVersion);
  std::cout << "fitted " << model.components.size() << " mixture components -> "
            << paths.covariance() << "\n";
  return 0;
}

int cmd_cv(const Config& cfg, std::size_t budget_flag) {
  const ExperimentConfig ec = ExperimentConfig::from(cfg);
  const Paths paths{ec.outdir};
  const SpaceTimeField residuals = read_space_time_file(paths.residuals());
  const KnotSet knots = read_knots_file(paths.knots());
  const Eigen::MatrixXd y = knot_values(residuals, knots);

  const Eigen::Index train_rows = static_cast<Eigen::Index>(ec.train_end - residuals.start);
  const Eigen::Index val_rows = static_cast<Eigen::Index>(ec.calib_end - ec.train_end);
  const Eigen::MatrixXd train = y.topRows(train_rows);
  const Eigen::MatrixXd val = y.middleRows(train_rows, val_rows);

  const std::size_t budget = budget_flag > 0 ? budget_flag : ec.cv_budget;
  const CvResult result =
      cross_validate(ec.grid, train, val, ec.cv_members, ec.esn_burn, ec.seed, budget);

  std::ofstream os(paths.cv_results());
  os << "n_h,m,phi,delta,lambda,a_w,a_u,pi_w,pi_u,mse\n";
  for (const auto& row : result.table) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%d,%g,%g,%g,%g,%g,%g,%g,%.17g", row.spec.n_h,
                  row.spec.m, row.spec.phi, row.spec.delta, row.spec.lambda, row.spec.a_w,
                  row.spec.a_u, row.spec.pi_w, row.spec.pi_u, row.mse);
    os << buf << "\n";
  }
  os.close();

  std::ofstream best(paths.best_spec());
  best << "[esn]\n"
       << "n_h = " << result.best.n_h << "\n"
       << "m = " << result.best.m << "\n"
       << "phi = " << result.best.phi << "\n"
       << "delta = " << result.best.delta << "\n"
       << "lambda = " << result.best.lambda << "\n"
       << "a_w = " << result.best.a_w << "\n"
       << "a_u = " << result.best.a_u << "\n"
       << "pi_w = " << result.best.pi_w << "\n"
       << "pi_u = " << result.best.pi_u << "\n";
  best.close();

  write_manifest(ec.outdir, "cv", config_hash(cfg), ec.seed,
                 {paths.residuals(), paths.knots()}, {paths.cv_results(), paths.best_spec()},
                 kVersion);
  std::cout << "evaluated " << result.table.size() << " grid points; best n_h="
            << result.best.n_h << " m=" << result.best.m << " lambda=" << result.best.lambda
            << " -> " << paths.best_spec() << "\n";
  return 0;
}

int cmd_train_esn(const Config& cfg, const std::string& spec_path) {
  const ExperimentConfig ec = ExperimentConfig::from(cfg);
  const Paths paths{ec.outdir};
  const SpaceTimeField residuals = read_space_time_file(paths.residuals());
  const KnotSet knots = read_knots_file(paths.knots());
  const Eigen::MatrixXd y = knot_values(residuals, knots);
  const Eigen::Index fit_rows = static_cast<Eigen::Index>(ec.calib_end - residuals.start);

  EsnSpec spec = esn_spec_with_fragment(ec, spec_path);
  spec.seed = ec.seed;

  EnsembleModelFile file;
  file.spec = spec;
  file.burn = ec.esn_burn;
  file.n_star = y.cols();
  file.readouts.resize(static_cast<std::size_t>(ec.ensemble));
  const Eigen::MatrixXd train = y.topRows(fit_rows);
  parallel_for(static_cast<std::size_t>(ec.ensemble), [&](std::size_t i) {
    EsnSpec member = spec;
    member.seed = spec.seed + i;
    file.readouts[i] = train_esn(member, train, ec.esn_burn).readout_map.B;
  });
  write_ensemble_file(paths.model(), file);

  std::vector<std::string> inputs = {paths.residuals(), paths.knots()};
  if (!spec_path.empty()) inputs.push_back(spec_path);
  write_manifest(ec.outdir, "train-esn", config_hash(cfg), ec.seed, inputs, {paths.model()},
                 kVersion);
  std::cout << "trained " << ec.ensemble << " members (n_h=" << spec.n_h << ", m=" << spec.m
            << ") on rows [0, " << fit_rows << ") -> " << paths.model() << "\n";
  return 0;
}

/// Rolls a stored ensemble over an evaluation window (the file holds one
/// readout per member; weights are regenerated from the member seeds).
ForecastEnsemble roll_stored_ensemble(const EnsembleModelFile& file,
                                      const Eigen::MatrixXd& history,
                                      const Eigen::MatrixXd& eval, int horizons) {
  ForecastEnsemble ens;
  ens.horizons = horizons;
  ens.members.resize(file.readouts.size());
  const Eigen::Index n = history.cols(), n_eval = eval.rows();
  parallel_for(file.readouts.size(), [&](std::size_t i) {
    EsnModel model;
    model.spec = file.spec;
    model.spec.seed = file.spec.seed + i;
    model.matrices = generate_matrices(model.spec, model.spec.input_dim(n));
    model.readout_map.B = file.readouts[i];
    KnotForecaster fc(model, history);
    auto& per_h = ens.members[i];
    per_h.resize(static_cast<std::size_t>(horizons));
    for (int h = 1; h <= horizons; ++h)
      per_h[static_cast<std::size_t>(h - 1)].resize(std::max<Eigen::Index>(n_eval - h + 1, 0), n);
    for (Eigen::Index a = 0; a < n_eval; ++a) {
      const Eigen::MatrixXd rows = fc.emit(horizons);
      for (int h = 1; h <= horizons; ++h) {
        const Eigen::Index target = a + h - 1;
        if (target < n_eval) per_h[static_cast<std::size_t>(h - 1)].row(target - (h - 1)) = rows.row(h - 1);
      }
      fc.observe(eval.row(a).transpose());
    }
  });
  ens.mean.resize(static_cast<std::size_t>(horizons));
  for (int h = 1; h <= horizons; ++h) {
    auto& m = ens.mean[static_cast<std::size_t>(h - 1)];
    m = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(n_eval - h + 1, 0), n);
    for (const auto& member : ens.members) m += member[static_cast<std::size_t>(h - 1)];
    m /= static_cast<double>(ens.members.size());
  }
  return ens;
}

int cmd_forecast(const Config& cfg, std::string model_path) {
  const ExperimentConfig ec = ExperimentConfig::from(cfg);
  const Paths paths{ec.outdir};
  if (model_path.empty()) model_path = paths.model();

  const SpaceTimeField residuals = read_space_time_file(paths.residuals());
  const KnotSet knots = read_knots_file(paths.knots());
  const CovarianceModel cov = read_covariance_file(paths.covariance());
  const EnsembleModelFile file = read_ensemble_file(model_path);

  const Eigen::MatrixXd y = knot_values(residuals, knots);
  const Eigen::Index hist_rows = static_cast<Eigen::Index>(ec.calib_end - residuals.start);
  const Eigen::MatrixXd history = y.topRows(hist_rows);
  const Eigen::MatrixXd eval = y.bottomRows(y.rows() - hist_rows);

  ForecastEnsemble ens = roll_stored_ensemble(file, history, eval, ec.horizons);
  const std::vector<Location> knot_locs = knots.locations(residuals);
  const KrigingWeights weights = cached_kriging_weights(paths, residuals, knot_locs, cov);
  reconstruct_full_field(ens, weights);

  std::vector<std::string> outputs;
  for (int h = 1; h <= ec.horizons; ++h) {
    const std::int64_t start = ec.calib_end + h - 1;
    write_space_time_file(paths.knot_forecast(h),
                          make_field(knot_locs, start, ens.mean[static_cast<std::size_t>(h - 1)]));
    write_space_time_file(
        paths.full_forecast(h),
        make_field(residuals.locations, start, ens.full_field[static_cast<std::size_t>(h - 1)]));
    outputs.push_back(paths.knot_forecast(h));
    outputs.push_back(paths.full_forecast(h));
  }
  write_manifest(ec.outdir, "forecast", config_hash(cfg), ec.seed,
                 {paths.residuals(), paths.knots(), paths.covariance(), model_path}, outputs,
                 kVersion);
  std::cout << "forecasted horizons 1.." << ec.horizons << " over " << eval.rows()
            << " evaluation hours at " << knot_locs.size() << " knots + "
            << residuals.n_locations() << " locations\n";
  return 0;
}

int cmd_calibrate(const Config& cfg, const std::string& spec_path) {
  const ExperimentConfig ec = ExperimentConfig::from(cfg);
  const Paths paths{ec.outdir};
  const SpaceTimeField residuals = read_space_time_file(paths.residuals());
  const KnotSet knots = read_knots_file(paths.knots());
  const CovarianceModel cov = read_covariance_file(paths.covariance());

  const Eigen::MatrixXd y = knot_values(residuals, knots);
  const Eigen::Index train_rows = static_cast<Eigen::Index>(ec.train_end - residuals.start);
  const Eigen::Index calib_rows = static_cast<Eigen::Index>(ec.calib_end - ec.train_end);
  const Eigen::MatrixXd train = y.topRows(train_rows);
  const Eigen::MatrixXd calib = y.middleRows(train_rows, calib_rows);

  EsnSpec spec = esn_spec_with_fragment(ec, spec_path);
  spec.seed = ec.seed;
  ForecastEnsemble ens = run_ensemble(spec, ec.ensemble, train, calib, ec.horizons, ec.esn_burn);

  const std::vector<Location> knot_locs = knots.locations(residuals);
  const KrigingWeights weights = cached_kriging_weights(paths, residuals, knot_locs, cov);
  reconstruct_full_field(ens, weights);

  // full-field truth aligned with each horizon's target list
  std::vector<Eigen::MatrixXd> truth(static_cast<std::size_t>(ec.horizons));
  for (int h = 1; h <= ec.horizons; ++h)
    truth[static_cast<std::size_t>(h - 1)] = residuals.values.middleRows(
        train_rows + h - 1, calib_rows - h + 1);

  const CalibrationQuantiles cal = calibrate(truth, ens.full_field, ec.quantile_levels());
  write_quantiles_file(paths.quantiles(), cal, residuals.locations);

  write_manifest(ec.outdir, "calibrate", config_hash(cfg), ec.seed,
                 {paths.residuals(), paths.knots(), paths.covariance()}, {paths.quantiles()},
                 kVersion);
  std::cout << "calibrated " << cal.levels.size() << " error quantile levels at "
            << residuals.n_locations() << " locations -> " << paths.quantiles() << "\n";
  return 0;
}

/// Aligns two fields on their common time range; locations must match.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> align(const SpaceTimeField& truth,
                                                  const SpaceTimeField& forecast) {
  if (!locations_match(truth, forecast))
    throw schema_error("evaluate: truth and forecast location lists differ");
  const std::int64_t lo = std::max(truth.start, forecast.start);
  const std::int64_t hi = std::min(truth.start + truth.n_times(),
                                   forecast.start + forecast.n_times());
  if (hi <= lo) throw schema_error("evaluate: no overlapping time range");
  return {truth.slice_times(lo, hi).values, forecast.slice_times(lo, hi).values};
}

int cmd_evaluate(const Config* cfg, const std::string& truth_path,
                 const std::string& forecast_path, const std::string& method_tag,
                 int horizon_tag) {
  // explicit file pair
  if (!truth_path.empty() || !forecast_path.empty()) {
    if (truth_path.empty() || forecast_path.empty())
      throw configuration_error("evaluate: --truth and --forecast go together");
    const auto [t, f] = align(read_space_time_file(truth_path), read_space_time_file(forecast_path));
    const double m = mse(t, f);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", m);
    std::cout << "mse," << (method_tag.empty() ? "file" : method_tag) << "," << horizon_tag
              << ",," << buf << "\n";
    return 0;
  }

  if (cfg == nullptr) throw configuration_error("evaluate: pass --config or --truth/--forecast");
  const ExperimentConfig ec = ExperimentConfig::from(*cfg);
  const Paths paths{ec.outdir};
  const SpaceTimeField residuals = read_space_time_file(paths.residuals());

  std::vector<std::string> rows;
  const bool have_quantiles = fs::exists(paths.quantiles());
  CalibrationQuantiles cal;
  if (have_quantiles)
    cal = read_quantiles_file(paths.quantiles(), residuals.locations, ec.horizons);

  auto eval_files = [&](const std::string& method, auto path_of) {
    for (int h = 1; h <= ec.horizons; ++h) {
      const std::string path = path_of(h);
      if (!fs::exists(path)) continue;
      const SpaceTimeField fc = read_space_time_file(path);
      const auto [t, f] = align(residuals, fc);
      append_metric(rows, "mse", method, h, "", mse(t, f));
      // the quantiles were calibrated on the ESN ensemble mean, so
      // intervals only make sense around those forecasts
      if (have_quantiles && method == "sesn" && locations_match(residuals, fc)) {
        for (double alpha : ec.levels) {
          const CoverageSummary cov = coverage(t, f, cal, h, alpha);
          char lvl[16];
          std::snprintf(lvl, sizeof(lvl), "%g", alpha);
          append_metric(rows, "coverage_mean", method, h, lvl, cov.mean);
          append_metric(rows, "coverage_sd", method, h, lvl, cov.sd);
        }
      }
    }
  };

  // knot-level and full-field S-ESN, then any baseline outputs
  {
    const KnotSet knots = fs::exists(paths.knots()) ? read_knots_file(paths.knots()) : KnotSet{};
    if (!knots.indices.empty()) {
      const SpaceTimeField knot_truth = residuals.select_locations(knots.indices);
      for (int h = 1; h <= ec.horizons; ++h) {
        const std::string path = paths.knot_forecast(h);
        if (!fs::exists(path)) continue;
        const auto [t, f] = align(knot_truth, read_space_time_file(path));
        append_metric(rows, "mse", "sesn-knots", h, "", mse(t, f));
      }
    }
  }
  eval_files("sesn", [&](int h) { return paths.full_forecast(h); });
  for (const std::string method : {"persistence", "arima", "var", "eof-esn"})
    eval_files(method, [&](int h) { return paths.baseline_forecast(method, h); });

  if (rows.empty())
    throw configuration_error("evaluate: no forecast files found under " + ec.outdir);
  write_metrics(paths.metrics(), rows);
  for (const auto& r : rows) std::cout << r << "\n";
  write_manifest(ec.outdir, "evaluate", config_hash(*cfg), ec.seed, {paths.residuals()},
                 {paths.metrics()}, kVersion);
  return 0;
}

int cmd_baseline(const Config& cfg, const std::string& method) {
  const ExperimentConfig ec = ExperimentConfig::from(cfg);
  const Paths paths{ec.outdir};
  const SpaceTimeField residuals = read_space_time_file(paths.residuals());

  const Eigen::Index fit_rows = static_cast<Eigen::Index>(ec.calib_end - residuals.start);
  const Eigen::Index train_rows = static_cast<Eigen::Index>(ec.train_end - residuals.start);
  const Eigen::Index n_eval = residuals.n_times() - fit_rows;
  const Eigen::Index n_loc = residuals.n_locations();
  const Eigen::MatrixXd& y = residuals.values;

  // forecasts[h-1]: rows over targets fit_rows+h-1 .. end
  std::vector<Eigen::MatrixXd> forecasts(static_cast<std::size_t>(ec.horizons));
  for (int h = 1; h <= ec.horizons; ++h)
    forecasts[static_cast<std::size_t>(h - 1)].resize(n_eval - h + 1, n_loc);

  if (method == "persistence") {
    for (Eigen::Index a = 0; a < n_eval; ++a)
      for (int h = 1; h <= ec.horizons; ++h)
        if (a + h - 1 < n_eval)
          forecasts[static_cast<std::size_t>(h - 1)].row(a) = y.row(fit_rows + a - 1);
  } else if (method == "arima") {
    parallel_for(static_cast<std::size_t>(n_loc), [&](std::size_t j) {
      const Eigen::Index jj = static_cast<Eigen::Index>(j);
      const ArimaOrder order = select_arima_order(y.col(jj).head(train_rows),
                                                  y.col(jj).segment(train_rows, fit_rows - train_rows));
      const ArimaModel model = fit_arima(y.col(jj).head(fit_rows), order.p, order.d, order.q);
      for (Eigen::Index a = 0; a < n_eval; ++a) {
        const Eigen::VectorXd fc = forecast_arima(model, y.col(jj).head(fit_rows + a), ec.horizons);
        for (int h = 1; h <= ec.horizons; ++h)
          if (a + h - 1 < n_eval) forecasts[static_cast<std::size_t>(h - 1)](a, jj) = fc(h - 1);
      }
    });
  } else if (method == "var") {
    const std::vector<double> orders = cfg.get_list("baselines.var_orders", {1, 2, 3});
    int best_p = static_cast<int>(orders.front());
    double best_sse = std::numeric_limits<double>::infinity();
    for (double po : orders) {
      const int p = static_cast<int>(po);
      const VarModel model = fit_var(y.topRows(train_rows), p);
      double sse = 0.0;
      for (Eigen::Index a = 0; a < fit_rows - train_rows; ++a) {
        const Eigen::MatrixXd fc = forecast_var(model, y.topRows(train_rows + a), 1);
        sse += (fc.row(0) - y.row(train_rows + a)).squaredNorm();
      }
      if (sse < best_sse) {
        best_sse = sse;
        best_p = p;
      }
    }
    const VarModel model = fit_var(y.topRows(fit_rows), best_p);
    for (Eigen::Index a = 0; a < n_eval; ++a) {
      const Eigen::MatrixXd fc = forecast_var(model, y.topRows(fit_rows + a), ec.horizons);
      for (int h = 1; h <= ec.horizons; ++h)
        if (a + h - 1 < n_eval) forecasts[static_cast<std::size_t>(h - 1)].row(a) = fc.row(h - 1);
    }
  } else if (method == "eof-esn") {
    Eigen::Index n_eof = cfg.get_int("baselines.n_eof", 0);
    if (n_eof <= 0) {
      if (!fs::exists(paths.knots()))
        throw configuration_error("baseline eof-esn: set baselines.n_eof or run select-knots "
                                  "first (the knot count is the default rank)");
      n_eof = static_cast<Eigen::Index>(read_knots_file(paths.knots()).size());
    }
    n_eof = std::min<Eigen::Index>(n_eof, std::min<Eigen::Index>(fit_rows - 1, n_loc));
    const EofBasis basis = eof_basis(y.topRows(fit_rows), static_cast<int>(n_eof));
    const Eigen::MatrixXd coeffs = eof_project(y, basis);
    EsnSpec spec = ec.esn;
    spec.seed = ec.seed;
    const ForecastEnsemble ens = run_ensemble(spec, ec.ensemble, coeffs.topRows(fit_rows),
                                              coeffs.bottomRows(n_eval), ec.horizons, ec.esn_burn);
    for (int h = 1; h <= ec.horizons; ++h)
      forecasts[static_cast<std::size_t>(h - 1)] =
          eof_reconstruct(ens.mean[static_cast<std::size_t>(h - 1)], basis);
  } else {
    throw configuration_error("baseline: unknown method '" + method +
                              "' (persistence|arima|var|eof-esn)");
  }

  std::vector<std::string> outputs;
  for (int h = 1; h <= ec.horizons; ++h) {
    const std::string path = paths.baseline_forecast(method, h);
    write_space_time_file(path, make_field(residuals.locations, ec.calib_end + h - 1,
                                           forecasts[static_cast<std::size_t>(h - 1)]));
    outputs.push_back(path);
  }
  write_manifest(ec.outdir, "baseline-" + method, config_hash(cfg), ec.seed,
                 {paths.residuals()}, outputs, kVersion);
  std::cout << "baseline " << method << " forecasts over " << n_eval << " hours -> "
            << paths.baseline_forecast(method, 1) << " ...\n";
  return 0;
}

int cmd_lorenz_study(const std::string& out, const std::vector<double>& etas, int replicates,
                     const std::vector<std::string>& methods, std::uint64_t seed,
                     int tune_members, int test_members) {
  StudyOptions opt;
  if (!etas.empty()) opt.etas = etas;
  opt.replicates = replicates;
  if (!methods.empty()) opt.methods = methods;
  opt.seed = seed;
  opt.tune_members = tune_members;
  opt.test_members = test_members;

  const auto rows = run_study(opt);
  fs::create_directories(fs::path(out).parent_path().empty() ? "." : fs::path(out).parent_path().string());
  std::ofstream os(out);
  if (!os) throw io_error("cannot open '" + out + "' for writing");
  os << "method,eta,horizon,mse_mean,mse_sd\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s,%g,%d,%.17g,%.17g", r.method.c_str(), r.eta, r.horizon,
                  r.mse_mean, r.mse_sd);
    os << buf << "\n";
  }
  std::cout << "study table (" << rows.size() << " rows) -> " << out << "\n";
  return 0;
}

int cmd_power(const Config& cfg, int horizon) {
  const ExperimentConfig ec = ExperimentConfig::from(cfg);
  const Paths paths{ec.outdir};
  const std::string registry_path = cfg.get("power.turbines");
  const double step_hours = cfg.get_double("power.step_hours", 1.0);
  const double price = cfg.get_double("power.price_per_kwh", 0.0);

  const std::vector<TurbineSite> turbines = read_turbine_registry(registry_path);
  const HarmonicModel harmonics = read_harmonics_file(paths.harmonics());
  const SpaceTimeField wind = load_wind(ec);

  std::map<std::string, Eigen::Index> loc_index;
  for (std::size_t j = 0; j < wind.locations.size(); ++j)
    loc_index[wind.locations[j].id] = static_cast<Eigen::Index>(j);
  std::vector<Eigen::Index> turbine_cols;
  for (const auto& t : turbines) {
    const auto it = loc_index.find(t.location_id);
    if (it == loc_index.end())
      throw schema_error("power: turbine location '" + t.location_id + "' not in the record");
    turbine_cols.push_back(it->second);
  }

  // harmonic model restricted to the turbine columns, for retrending
  HarmonicModel sub;
  sub.periods = harmonics.periods;
  sub.coefficients.resize(harmonics.coefficients.rows(),
                          static_cast<Eigen::Index>(turbine_cols.size()));
  sub.scale.resize(static_cast<Eigen::Index>(turbine_cols.size()));
  for (std::size_t k = 0; k < turbine_cols.size(); ++k) {
    sub.locations.push_back(wind.locations[static_cast<std::size_t>(turbine_cols[k])]);
    sub.coefficients.col(static_cast<Eigen::Index>(k)) = harmonics.coefficients.col(turbine_cols[k]);
    sub.scale(static_cast<Eigen::Index>(k)) = harmonics.scale(turbine_cols[k]);
  }

  auto speeds_to_power = [&](const Eigen::MatrixXd& speeds, std::size_t t_idx) {
    Eigen::VectorXd power(speeds.rows());
    const auto& site = turbines[t_idx];
    for (Eigen::Index r = 0; r < speeds.rows(); ++r)
      power(r) = to_power(to_hub_height(speeds(r, static_cast<Eigen::Index>(t_idx)),
                                        site.hub_height, site.alpha),
                          site.curve);
    return power;
  };

  std::vector<std::string> rows;
  Eigen::MatrixXd truth_speeds;  // targets x turbines, filled below
  std::int64_t target_start = 0;
  Eigen::Index n_targets = 0;

  auto evaluate_method = [&](const std::string& method, const std::string& forecast_path) {
    if (!fs::exists(forecast_path)) return;
    const SpaceTimeField fc = read_space_time_file(forecast_path);
    std::vector<Eigen::Index> cols;
    std::map<std::string, Eigen::Index> idx;
    for (std::size_t j = 0; j < fc.locations.size(); ++j)
      idx[fc.locations[j].id] = static_cast<Eigen::Index>(j);
    for (const auto& t : turbines) {
      const auto it = idx.find(t.location_id);
      if (it == idx.end()) return;  // forecast does not cover the turbines
      cols.push_back(it->second);
    }
    SpaceTimeField fc_sub = fc.select_locations(cols);
    const SpaceTimeField speeds = retrend(fc_sub, sub).field;

    if (truth_speeds.rows() == 0) {
      target_start = speeds.start;
      n_targets = speeds.n_times();
      const SpaceTimeField truth_slice =
          wind.slice_times(target_start, target_start + n_targets);
      truth_speeds.resize(n_targets, static_cast<Eigen::Index>(turbine_cols.size()));
      for (std::size_t k = 0; k < turbine_cols.size(); ++k)
        truth_speeds.col(static_cast<Eigen::Index>(k)) = truth_slice.values.col(turbine_cols[k]);
    }
    const Eigen::Index lo = static_cast<Eigen::Index>(speeds.start - target_start);

    double total = 0.0;
    for (std::size_t t_idx = 0; t_idx < turbines.size(); ++t_idx) {
      const Eigen::VectorXd truth_power = speeds_to_power(truth_speeds, t_idx);
      const Eigen::VectorXd fc_power = speeds_to_power(speeds.values, t_idx);
      total += energy_error(truth_power.segment(lo, speeds.n_times()), fc_power, step_hours);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", total);
    rows.push_back("energy_error_kwh," + method + "," + std::to_string(horizon) + ",," + buf);
    if (price > 0.0) {
      std::snprintf(buf, sizeof(buf), "%.17g", total * price);
      rows.push_back("energy_error_cost," + method + "," + std::to_string(horizon) + ",," + buf);
    }
  };

  evaluate_method("sesn", paths.full_forecast(horizon));
  for (const std::string m : {"persistence", "arima", "var", "eof-esn"})
    evaluate_method(m, paths.baseline_forecast(m, horizon));
  if (rows.empty())
    throw configuration_error("power: no forecast files with turbine coverage found");

  // per-level totals from the calibrated quantile forecasts
  if (fs::exists(paths.quantiles()) && fs::exists(paths.full_forecast(horizon))) {
    const SpaceTimeField residuals = read_space_time_file(paths.residuals());
    const CalibrationQuantiles cal =
        read_quantiles_file(paths.quantiles(), residuals.locations, ec.horizons);
    const SpaceTimeField fc = read_space_time_file(paths.full_forecast(horizon));
    std::map<std::string, Eigen::Index> idx;
    for (std::size_t j = 0; j < fc.locations.size(); ++j)
      idx[fc.locations[j].id] = static_cast<Eigen::Index>(j);
    std::map<std::string, Eigen::Index> res_idx;
    for (std::size_t j = 0; j < residuals.locations.size(); ++j)
      res_idx[residuals.locations[j].id] = static_cast<Eigen::Index>(j);

    for (std::size_t l = 0; l < cal.levels.size(); ++l) {
      double total = 0.0;
      for (std::size_t t_idx = 0; t_idx < turbines.size(); ++t_idx) {
        const auto& site = turbines[t_idx];
        const Eigen::Index fc_col = idx.at(site.location_id);
        const Eigen::Index res_col = res_idx.at(site.location_id);
        SpaceTimeField one;
        one.locations = {sub.locations[t_idx]};
        one.start = fc.start;
        one.values = fc.values.col(fc_col) +
                     Eigen::VectorXd::Constant(fc.n_times(),
                                               cal.q[static_cast<std::size_t>(horizon - 1)](
                                                   static_cast<Eigen::Index>(l), res_col));
        HarmonicModel hm1;
        hm1.periods = sub.periods;
        hm1.locations = {sub.locations[t_idx]};
        hm1.coefficients = sub.coefficients.col(static_cast<Eigen::Index>(t_idx));
        hm1.scale = sub.scale.segment(static_cast<Eigen::Index>(t_idx), 1);
        const SpaceTimeField qspeed = retrend(one, hm1).field;
        const Eigen::VectorXd truth_power = speeds_to_power(truth_speeds, t_idx);
        Eigen::VectorXd qpower(qspeed.n_times());
        for (Eigen::Index r = 0; r < qspeed.n_times(); ++r)
          qpower(r) = to_power(to_hub_height(qspeed.values(r, 0), site.hub_height, site.alpha),
                               site.curve);
        const Eigen::Index lo = static_cast<Eigen::Index>(qspeed.start - target_start);
        total += energy_error(truth_power.segment(lo, qspeed.n_times()), qpower, step_hours);
      }
      char lvl[16], buf[64];
      std::snprintf(lvl, sizeof(lvl), "%g", cal.levels[l]);
      std::snprintf(buf, sizeof(buf), "%.17g", total);
      rows.push_back(std::string("quantile_energy_error_kwh,sesn,") + std::to_string(horizon) +
                     "," + lvl + "," + buf);
    }
  }

  write_metrics(paths.power_metrics(), rows);
  for (const auto& r : rows) std::cout << r << "\n";
  write_manifest(ec.outdir, "power", config_hash(cfg), ec.seed,
                 {registry_path, paths.harmonics()}, {paths.power_metrics()}, kVersion);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatio-temporal wind forecasting with dimensionally reduced echo state networks"};
  app.require_subcommand(1);

  // make-demo
  auto* demo = app.add_subcommand("make-demo", "generate the synthetic demo dataset and config");
  std::string demo_out = "demo";
  std::uint64_t demo_seed = 20240809;
  int demo_side = 10, demo_hours = 2000;
  demo->add_option("-o,--out", demo_out, "output directory");
  demo->add_option("--seed", demo_seed, "generator seed");
  demo->add_option("--side", demo_side, "locations per grid side");
  demo->add_option("--hours", demo_hours, "record length in hours");

  CommonArgs fit_mean_args, knots_args, cov_args, cv_args, train_args, forecast_args,
      calibrate_args, baseline_args, power_args;
  auto* fit_mean = app.add_subcommand("fit-mean", "fit the square-root harmonic mean structure");
  add_common(fit_mean, fit_mean_args);

  auto* select = app.add_subcommand("select-knots", "choose grid and high-wind knots");
  add_common(select, knots_args);

  auto* fitcov = app.add_subcommand("fit-cov", "fit the nonstationary covariance model");
  add_common(fitcov, cov_args);

  auto* cv = app.add_subcommand("cv", "grid-search ESN hyperparameters");
  add_common(cv, cv_args);
  std::size_t cv_budget = 0;
  cv->add_option("--budget", cv_budget, "cap on grid evaluations (deterministic subsample)");

  auto* train = app.add_subcommand("train-esn", "train the forecasting ensemble");
  add_common(train, train_args);
  std::string train_spec;
  train->add_option("--spec", train_spec, "best-spec fragment from cv (best_esn.ini)");

  auto* fc = app.add_subcommand("forecast", "roll the ensemble over the test window");
  add_common(fc, forecast_args);
  std::string model_path;
  fc->add_option("--model", model_path, "trained model file (default <outdir>/model.esnm)");

  auto* cal = app.add_subcommand("calibrate", "estimate empirical forecast-error quantiles");
  add_common(cal, calibrate_args);
  std::string cal_spec;
  cal->add_option("--spec", cal_spec, "best-spec fragment from cv (best_esn.ini)");

  auto* eval = app.add_subcommand("evaluate", "MSE and interval coverage metrics");
  CommonArgs eval_args;
  eval->add_option("-c,--config", eval_args.config_path, "configuration file");
  eval->add_option("--set", eval_args.overrides, "override a config key");
  std::string eval_truth, eval_forecast, eval_tag = "file";
  int eval_horizon = 1;
  eval->add_option("--truth", eval_truth, "truth field file (explicit pair mode)");
  eval->add_option("--forecast", eval_forecast, "forecast field file (explicit pair mode)");
  eval->add_option("--method", eval_tag, "method tag for the explicit pair");
  eval->add_option("--horizon", eval_horizon, "horizon tag for the explicit pair");

  auto* baseline = app.add_subcommand("baseline", "persistence | arima | var | eof-esn forecasts");
  add_common(baseline, baseline_args);
  std::string baseline_method;
  baseline->add_option("method", baseline_method, "baseline method")->required();

  auto* lorenz = app.add_subcommand("lorenz-study", "comparative study on modified Lorenz 96");
  std::string lorenz_out = "lorenz_study.csv";
  std::vector<double> lorenz_etas;
  std::vector<std::string> lorenz_methods;
  int lorenz_reps = 50, lorenz_tune = 2, lorenz_test = 20;
  std::uint64_t lorenz_seed = 1;
  lorenz->add_option("-o,--out", lorenz_out, "output CSV");
  lorenz->add_option("--etas", lorenz_etas, "nonlinearity factors")->delimiter(',');
  lorenz->add_option("--replicates", lorenz_reps, "replicates per eta");
  lorenz->add_option("--methods", lorenz_methods, "methods to compare")->delimiter(',');
  lorenz->add_option("--seed", lorenz_seed, "base seed");
  lorenz->add_option("--tune-members", lorenz_tune, "ensemble size during tuning");
  lorenz->add_option("--test-members", lorenz_test, "ensemble size on the test block");

  auto* power = app.add_subcommand("power", "convert speed forecasts to power and energy error");
  add_common(power, power_args);
  int power_horizon = 2;
  power->add_option("--horizon", power_horizon, "forecast horizon to convert");

  CLI11_PARSE(app, argc, argv);

  try {
    if (demo->parsed()) return cmd_make_demo(demo_out, demo_seed, demo_side, demo_hours);
    if (fit_mean->parsed()) return cmd_fit_mean(load_config(fit_mean_args));
    if (select->parsed()) return cmd_select_knots(load_config(knots_args));
    if (fitcov->parsed()) return cmd_fit_cov(load_config(cov_args));
    if (cv->parsed()) return cmd_cv(load_config(cv_args), cv_budget);
    if (train->parsed()) return cmd_train_esn(load_config(train_args), train_spec);
    if (fc->parsed()) return cmd_forecast(load_config(forecast_args), model_path);
    if (cal->parsed()) return cmd_calibrate(load_config(calibrate_args), cal_spec);
    if (eval->parsed()) {
      std::optional<Config> cfg;
      if (!eval_args.config_path.empty()) cfg = load_config(eval_args);
      return cmd_evaluate(cfg ? &*cfg : nullptr, eval_truth, eval_forecast, eval_tag,
                          eval_horizon);
    }
    if (baseline->parsed()) return cmd_baseline(load_config(baseline_args), baseline_method);
    if (lorenz->parsed())
      return cmd_lorenz_study(lorenz_out, lorenz_etas, lorenz_reps, lorenz_methods, lorenz_seed,
                              lorenz_tune, lorenz_test);
    if (power->parsed()) return cmd_power(load_config(power_args), power_horizon);
  } catch (const Error& e) {
    std::cerr << "error:" << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error:internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
