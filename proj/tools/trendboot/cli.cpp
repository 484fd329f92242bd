#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "run_config.hpp"
#include "trendboot/clustering.hpp"
#include "trendboot/csv.hpp"
#include "trendboot/error.hpp"
#include "trendboot/experiments.hpp"
#include "trendboot/grid.hpp"
#include "trendboot/resampling.hpp"
#include "trendboot/rng.hpp"
#include "trendboot/series.hpp"
#include "trendboot/trend.hpp"
#include "trendboot/version.hpp"

namespace trendboot::cli {

namespace {

namespace fs = std::filesystem;
using clustering::CovarianceFamily;

constexpr double kMaxCount = 1e7;

std::vector<KeySpec> common_keys() {
  return {
      {"seed", KeyKind::integer, "0", "master random seed", 0, 9.2e18, {}, false},
      {"threads", KeyKind::integer, "1", "worker threads, 0 = all cores", 0, 1024, {}, false},
  };
}

KeySpec count_key(std::string key, std::string def, std::string help, double min = 1) {
  return {std::move(key), KeyKind::integer, std::move(def), std::move(help), min, kMaxCount, {}, false};
}

KeySpec out_key() { return {"out", KeyKind::path, "-", "output CSV path, '-' for stdout", 0, 0, {}, false}; }

KeySpec required_path(std::string key, std::string help) {
  return {std::move(key), KeyKind::path, "", std::move(help), 0, 0, {}, true};
}

std::vector<std::string> family_codes() {
  std::vector<std::string> out;
  for (auto f : clustering::kAllFamilies) out.emplace_back(clustering::to_string(f));
  return out;
}

std::vector<KeySpec> cluster_keys(std::string max_default) {
  return {
      count_key("clusters_min", "1", "smallest mixture size K"),
      count_key("clusters_max", std::move(max_default), "largest mixture size K"),
      {"families", KeyKind::text_list, "EII,VII,EEE,VEV,VVV", "covariance families to compare", 0, 0, family_codes(),
       false},
  };
}

std::vector<KeySpec> table1_keys() {
  return {
      count_key("n", "23360", "series length", 100),
      {"r", KeyKind::real, "0.812", "AR(1) coefficient of the errors", -0.999, 0.999, {}, false},
      {"trend", KeyKind::real, "8.6e-05", "trend per step", -1, 1, {}, false},
      {"innovation_sd", KeyKind::real, "1.874", "AR(1) innovation standard deviation", 1e-12, 1e6, {}, false},
      count_key("outer", "500", "simulated series"),
      count_key("inner", "500", "bootstrap replicates per series"),
      count_key("select_replicates", "200", "weight draws per candidate when selecting r", 2),
      count_key("block_length", "0", "moving-block length, 0 = Politis-White", 0),
      out_key(),
  };
}

std::vector<KeySpec> table2_keys() {
  return {
      {"years", KeyKind::integer_list, "10,30,60", "series lengths in years of 365 days", 1, 1000, {}, false},
      {"trend", KeyKind::real, "0.0001", "trend per step", -1, 1, {}, false},
      {"r", KeyKind::real, "0.9", "AR(1) coefficient of the errors", -0.999, 0.999, {}, false},
      {"innovation_sd", KeyKind::real, "0.4358898943540674", "AR(1) innovation standard deviation", 1e-12, 1e6, {},
       false},
      count_key("outer", "100", "simulated series per length"),
      count_key("inner", "500", "bootstrap replicates per series"),
      count_key("select_replicates", "200", "weight draws per candidate when selecting r", 2),
      {"method", KeyKind::text, "dep_wild_ar1", "bootstrap scheme", 0, 0, {"dep_wild_ar1", "wild"}, false},
      out_key(),
  };
}

std::vector<KeySpec> analyze_keys() {
  std::vector<KeySpec> keys{
      required_path("grid", "grid CSV (cell_id,lat,lon,date,value)"),
      {"nao", KeyKind::path, "", "optional NAO index CSV (date,value)", 0, 0, {}, false},
      required_path("out_dir", "output directory"),
      {"span", KeyKind::real, "0.3", "seasonal smoother span", 0.01, 1, {}, false},
      {"first_year", KeyKind::integer, "1950", "first calendar year analyzed", 1, 9999, {}, false},
      {"last_year", KeyKind::integer, "2015", "last calendar year analyzed", 1, 9999, {}, false},
      {"k_max", KeyKind::integer, "30", "length of the sliding-start coefficient curve", 1, 1000, {}, false},
      {"k_compare", KeyKind::integer_list, "20,30", "omitted leading years of the bootstrapped segments", 0, 1000, {},
       false},
      count_key("replicates", "100", "bootstrap replicates per segment"),
      count_key("select_replicates", "200", "weight draws per candidate when selecting r", 2),
      {"missing_threshold", KeyKind::real, "0.2", "largest missing fraction of an analyzed cell", 0, 1, {}, false},
  };
  for (auto& k : cluster_keys("20")) keys.push_back(std::move(k));
  return keys;
}

std::vector<KeySpec> cluster_command_keys() {
  std::vector<KeySpec> keys{
      required_path("input", "points CSV: id column followed by one column per coordinate"),
      required_path("out_dir", "output directory"),
  };
  for (auto& k : cluster_keys("10")) keys.push_back(std::move(k));
  return keys;
}

std::vector<KeySpec> bootstrap_keys() {
  return {
      required_path("input", "series CSV (date,value)"),
      {"method", KeyKind::text, "dep_wild_ar1", "bootstrap scheme", 0, 0,
       {"efron", "wild", "dep_wild_ar1", "dep_wild_kernel", "moving_block"}, false},
      count_key("replicates", "500", "bootstrap replicates"),
      {"weights", KeyKind::text, "rademacher", "iid weight law for wild", 0, 0, {"rademacher", "normal"}, false},
      {"r", KeyKind::real, "0", "AR(1) weight coefficient for dep_wild_ar1, 0 = select", 0, 0.999, {}, false},
      count_key("bandwidth", "25", "Bartlett kernel bandwidth for dep_wild_kernel"),
      count_key("block_length", "0", "moving-block length, 0 = Politis-White", 0),
      count_key("select_replicates", "200", "weight draws per candidate when selecting r", 2),
      out_key(),
      {"replicates_out", KeyKind::path, "", "optional CSV of every replicate slope", 0, 0, {}, false},
  };
}

std::vector<KeySpec> block_length_keys() {
  return {required_path("input", "series CSV (date,value)"), out_key()};
}

// Writes to `fallback` for "-", otherwise to the named file.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw IoError("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::ofstream open_file(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::uint64_t seed_of(const RunConfig& cfg) { return static_cast<std::uint64_t>(cfg.integer("seed")); }
unsigned threads_of(const RunConfig& cfg) { return static_cast<unsigned>(cfg.integer("threads")); }

std::vector<CovarianceFamily> families_of(const RunConfig& cfg) {
  std::vector<CovarianceFamily> out;
  for (const auto& code : cfg.text_list("families")) out.push_back(clustering::parse_family(code));
  return out;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

void write_manifest_header(std::ostream& m, std::string_view command) {
  m << "command=" << command << '\n';
  m << "trendboot_version=" << TRENDBOOT_VERSION << '\n';
  m << "eigen_version=" << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n';
#if defined(__clang__)
  m << "compiler=clang " << __clang_major__ << '.' << __clang_minor__ << '\n';
#elif defined(__GNUC__)
  m << "compiler=gcc " << __GNUC__ << '.' << __GNUC_MINOR__ << '\n';
#endif
}

// ---------------------------------------------------------------------------

int cmd_table1(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  experiments::Table1Config c;
  c.n = static_cast<std::size_t>(cfg.integer("n"));
  c.r = cfg.real("r");
  c.trend = cfg.real("trend");
  c.innovation_sd = cfg.real("innovation_sd");
  c.outer = static_cast<std::size_t>(cfg.integer("outer"));
  c.inner = static_cast<std::size_t>(cfg.integer("inner"));
  c.select_replicates = static_cast<std::size_t>(cfg.integer("select_replicates"));
  if (const auto b = cfg.integer("block_length"); b > 0) c.block_length = static_cast<std::size_t>(b);
  c.seed = seed_of(cfg);
  c.threads = threads_of(cfg);
  const auto result = experiments::run_table1(c);
  Sink sink(cfg.text("out"), out);
  experiments::write_quantile_table_csv(sink.get(), result.rows, 1e5);
  err << "mean selected r: " << result.mean_selected_r << ", mean block length: " << result.mean_block_length
      << '\n';
  return 0;
}

int cmd_table2(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  experiments::Table2Config c;
  c.years.clear();
  for (auto y : cfg.integer_list("years")) c.years.push_back(static_cast<int>(y));
  c.trend = cfg.real("trend");
  c.r = cfg.real("r");
  c.innovation_sd = cfg.real("innovation_sd");
  c.outer = static_cast<std::size_t>(cfg.integer("outer"));
  c.inner = static_cast<std::size_t>(cfg.integer("inner"));
  c.select_replicates = static_cast<std::size_t>(cfg.integer("select_replicates"));
  c.method = resampling::parse_method(cfg.text("method"));
  c.seed = seed_of(cfg);
  c.threads = threads_of(cfg);
  const auto rows = experiments::run_table2(c);
  Sink sink(cfg.text("out"), out);
  experiments::write_table2_csv(sink.get(), rows);
  for (const auto& row : rows) err << row.years << " years: mean selected r " << row.mean_selected_r << '\n';
  return 0;
}

int cmd_analyze(const RunConfig& cfg, std::ostream&, std::ostream& err) {
  grid::AnalysisConfig ac;
  ac.span = cfg.real("span");
  ac.first_year = static_cast<int>(cfg.integer("first_year"));
  ac.last_year = static_cast<int>(cfg.integer("last_year"));
  ac.k_max = static_cast<int>(cfg.integer("k_max"));
  ac.k_compare.clear();
  for (auto k : cfg.integer_list("k_compare")) ac.k_compare.push_back(static_cast<int>(k));
  ac.replicates = static_cast<std::size_t>(cfg.integer("replicates"));
  ac.select_replicates = static_cast<std::size_t>(cfg.integer("select_replicates"));
  ac.missing_threshold = cfg.real("missing_threshold");
  ac.seed = seed_of(cfg);
  ac.threads = threads_of(cfg);
  try {
    ac.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto k_min = static_cast<std::size_t>(cfg.integer("clusters_min"));
  const auto k_max = static_cast<std::size_t>(cfg.integer("clusters_max"));
  if (k_max < k_min) throw ConfigError("clusters_max must be at least clusters_min");
  const auto families = families_of(cfg);

  const auto dataset = grid::ingest_grid_csv(fs::path(cfg.text("grid")));
  std::optional<series::DailySeries> nao;
  if (cfg.has("nao")) nao = series::read_series_csv(fs::path(cfg.text("nao")));

  auto analysis = grid::analyze_grid(dataset, nao ? &*nao : nullptr, ac);

  std::vector<std::size_t> rows;
  const Eigen::MatrixXd x = grid::curve_matrix(analysis.results, rows);
  const auto d = static_cast<std::size_t>(x.cols());
  std::optional<clustering::ModelSelection> selection;
  std::string clustering_note;
  const std::size_t feasible_k = d == 0 ? 0 : rows.size() / (d + 1);
  if (feasible_k < k_min) {
    clustering_note = "skipped: " + std::to_string(rows.size()) + " complete curves of dimension " +
                      std::to_string(d) + " are too few for K=" + std::to_string(k_min);
  } else {
    selection = clustering::select_model(x, k_min, std::min(k_max, feasible_k), families,
                                         derive_seed(ac.seed, "cluster"), ac.threads);
    for (std::size_t j = 0; j < rows.size(); ++j) analysis.results[rows[j]].cluster = selection->assignment.labels[j];
    clustering_note = "bic";
  }

  const fs::path dir(cfg.text("out_dir"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  grid::export_results(analysis.results, grid::ExportFormat::csv, dir / "results.csv");
  grid::export_results(analysis.results, grid::ExportFormat::geojson, dir / "results.geojson");
  {
    std::vector<trend::NamedCurve> curves;
    for (const auto& r : analysis.results) {
      if (!r.excluded) curves.push_back({r.cell_id, r.curve});
    }
    auto f = open_file(dir / "curves.csv");
    trend::write_curves_csv(f, curves);
  }
  {
    auto f = open_file(dir / "bic.csv");
    clustering::write_bic_csv(f, selection ? std::span<const clustering::BicEntry>(selection->table)
                                           : std::span<const clustering::BicEntry>());
  }
  {
    auto f = open_file(dir / "assignments.csv");
    std::vector<std::string> ids;
    for (auto i : rows) ids.push_back(analysis.results[i].cell_id);
    if (selection) {
      clustering::write_assignment_csv(f, selection->assignment, ids);
    } else {
      f << "point_id,label,max_responsibility\n";
    }
  }
  {
    auto f = open_file(dir / "failures.csv");
    f << "cell_id,message\n";
    for (const auto& fail : analysis.failures) f << fail.cell_id << ',' << one_line(fail.message) << '\n';
  }

  std::size_t excluded = 0;
  for (const auto& r : analysis.results) excluded += r.excluded ? 1 : 0;
  {
    auto m = open_file(dir / "manifest.txt");
    write_manifest_header(m, "analyze");
    cfg.echo(m);
    m << "cells_total=" << dataset.size() << '\n';
    m << "cells_analyzed=" << analysis.results.size() - excluded << '\n';
    m << "cells_excluded=" << excluded << '\n';
    m << "cells_failed=" << analysis.failures.size() << '\n';
    m << "grid_resolution=" << csv::format_real(dataset.resolution) << '\n';
    m << "clustering=" << clustering_note << '\n';
    if (selection) {
      m << "selected_k=" << selection->best.components() << '\n';
      m << "selected_family=" << clustering::to_string(selection->best.family) << '\n';
    }
  }

  if (!analysis.failures.empty()) {
    err << "error: " << analysis.failures.size() << " cell(s) failed\n";
    for (const auto& fail : analysis.failures) err << "  cell " << fail.cell_id << ": " << fail.message << '\n';
    return 3;
  }
  return 0;
}

clustering::Points read_points_csv(const fs::path& path, std::vector<std::string>& ids) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<double> flat;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (width == 0) {
      if (fields.size() < 2) throw ParseError(line_no, "expected an id column and at least one coordinate");
      width = fields.size();
      continue;
    }
    if (fields.size() != width) throw ParseError(line_no, "expected " + std::to_string(width) + " fields");
    ids.emplace_back(csv::trim(fields[0]));
    for (std::size_t j = 1; j < width; ++j) {
      bool ok = true;
      const auto v = csv::parse_real(fields[j], ok);
      if (!ok || !v) throw ParseError(line_no, "malformed coordinate '" + std::string(fields[j]) + "'");
      flat.push_back(*v);
    }
  }
  if (width == 0) throw ParseError(line_no, "missing header");
  const auto d = static_cast<Eigen::Index>(width - 1);
  clustering::Points x(static_cast<Eigen::Index>(ids.size()), d);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = flat[static_cast<std::size_t>(i * d + j)];
  }
  return x;
}

int cmd_cluster(const RunConfig& cfg, std::ostream&, std::ostream& err) {
  std::vector<std::string> ids;
  const auto x = read_points_csv(fs::path(cfg.text("input")), ids);
  const auto k_min = static_cast<std::size_t>(cfg.integer("clusters_min"));
  const auto k_max = static_cast<std::size_t>(cfg.integer("clusters_max"));
  if (k_max < k_min) throw ConfigError("clusters_max must be at least clusters_min");
  const auto families = families_of(cfg);
  const auto selection = clustering::select_model(x, k_min, k_max, families, seed_of(cfg), threads_of(cfg));

  const fs::path dir(cfg.text("out_dir"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    auto f = open_file(dir / "bic.csv");
    clustering::write_bic_csv(f, selection.table);
  }
  {
    auto f = open_file(dir / "assignments.csv");
    clustering::write_assignment_csv(f, selection.assignment, ids);
  }
  err << "selected K=" << selection.best.components() << ' ' << clustering::to_string(selection.best.family)
      << '\n';
  return 0;
}

int cmd_bootstrap(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto s = series::read_series_csv(fs::path(cfg.text("input")));
  resampling::BootstrapConfig b;
  b.method = resampling::parse_method(cfg.text("method"));
  b.replicates = static_cast<std::size_t>(cfg.integer("replicates"));
  b.seed = seed_of(cfg);
  b.threads = threads_of(cfg);
  switch (b.method) {
    case resampling::Method::wild:
      if (cfg.text("weights") == "normal") {
        b.weights = resampling::IidNormal{};
      } else {
        b.weights = resampling::IidRademacher{};
      }
      break;
    case resampling::Method::dep_wild_ar1: {
      double r = cfg.real("r");
      if (r == 0.0) {
        const auto fit = trend::fit_ols_trend(s.values());
        const auto grid = resampling::default_weight_grid();
        r = resampling::select_ar1_weight_param(fit.residuals, grid,
                                                static_cast<std::size_t>(cfg.integer("select_replicates")),
                                                derive_seed(b.seed, "select"));
        err << "selected r: " << r << '\n';
      }
      b.weights = resampling::Ar1Weights{r};
      break;
    }
    case resampling::Method::dep_wild_kernel:
      b.weights = resampling::KernelMvn{static_cast<std::size_t>(cfg.integer("bandwidth"))};
      break;
    case resampling::Method::moving_block:
      if (const auto bl = cfg.integer("block_length"); bl > 0) b.block_length = static_cast<std::size_t>(bl);
      break;
    case resampling::Method::efron:
      break;
  }
  const auto result = resampling::bootstrap_trend(s.values(), b);
  {
    Sink sink(cfg.text("out"), out);
    auto& o = sink.get();
    o << "method,level,quantile_value\n";
    for (const auto& [level, value] : result.quantiles) {
      o << resampling::to_string(b.method) << ',' << csv::format_real(level) << ',' << csv::format_real(value)
        << '\n';
    }
  }
  if (cfg.has("replicates_out")) {
    auto f = open_file(cfg.text("replicates_out"));
    f << "replicate,slope\n";
    for (std::size_t i = 0; i < result.slope_replicates.size(); ++i) {
      f << i << ',' << csv::format_real(result.slope_replicates[i]) << '\n';
    }
  }
  err << "point estimate: " << result.point_estimate;
  if (b.method == resampling::Method::moving_block) err << ", block length: " << result.block_length;
  err << '\n';
  return 0;
}

int cmd_block_length(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto s = series::read_series_csv(fs::path(cfg.text("input")));
  const auto fit = trend::fit_ols_trend(s.values());
  const auto b = resampling::politis_white_block_length(fit.residuals);
  Sink sink(cfg.text("out"), out);
  sink.get() << "n,block_length\n" << s.present_count() << ',' << b << '\n';
  return 0;
}

std::string type_label(KeyKind kind) {
  switch (kind) {
    case KeyKind::integer: return "INT";
    case KeyKind::real: return "REAL";
    case KeyKind::text: return "TEXT";
    case KeyKind::path: return "PATH";
    case KeyKind::integer_list: return "INT,...";
    case KeyKind::real_list: return "REAL,...";
    case KeyKind::text_list: return "TEXT,...";
  }
  return "TEXT";
}

struct Command {
  std::string name;
  std::string description;
  std::vector<KeySpec> schema;
  std::function<int(const RunConfig&, std::ostream&, std::ostream&)> run;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> given;
  std::map<std::string, CLI::Option*> options;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trend estimation and bootstrap inference for daily climate series"};
  app.name("trendboot");
  app.require_subcommand(1);

  std::string seed_text;
  std::string threads_text;
  std::string config_path;
  auto* seed_opt = app.add_option("--seed", seed_text, "master random seed (default 0)")->type_name("INT");
  auto* threads_opt =
      app.add_option("--threads", threads_text, "worker threads, 0 = all cores (default 1)")->type_name("INT");
  auto* config_opt =
      app.add_option("--config", config_path, "key = value file; command-line flags take precedence")->type_name("PATH");

  std::vector<std::unique_ptr<Command>> commands;
  const auto add = [&](std::string name, std::string description, std::vector<KeySpec> keys,
                       std::function<int(const RunConfig&, std::ostream&, std::ostream&)> run) {
    auto cmd = std::make_unique<Command>();
    cmd->name = std::move(name);
    cmd->description = std::move(description);
    cmd->schema = std::move(keys);
    for (auto& k : common_keys()) cmd->schema.push_back(std::move(k));
    cmd->run = std::move(run);
    cmd->app = app.add_subcommand(cmd->name, cmd->description);
    cmd->app->fallthrough();
    cmd->app->footer("Every --key above may also be given as 'key = value' in the --config file.");
    for (const auto& spec : cmd->schema) {
      if (spec.key == "seed" || spec.key == "threads") continue;
      auto* option = cmd->app->add_option("--" + spec.key, cmd->given[spec.key], describe(spec));
      option->type_name(type_label(spec.kind));
      cmd->options[spec.key] = option;
    }
    commands.push_back(std::move(cmd));
  };
  add("simulate-table1", "Bootstrap interval comparison on simulated AR(1) trend series", table1_keys(), cmd_table1);
  add("simulate-table2", "Share of negative bootstrap slopes for short and long series", table2_keys(), cmd_table2);
  add("analyze", "Per-cell trend curves, bootstrap significance and clustering of a grid", analyze_keys(),
      cmd_analyze);
  add("cluster", "Gaussian mixture clustering of points with BIC model selection", cluster_command_keys(),
      cmd_cluster);
  add("bootstrap", "Bootstrap quantiles of the trend slope of one series", bootstrap_keys(), cmd_bootstrap);
  add("block-length", "Politis-White block length of the detrended series", block_length_keys(), cmd_block_length);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  Command* active = nullptr;
  for (auto& c : commands) {
    if (c->app->parsed()) active = c.get();
  }
  if (active == nullptr) return 2;

  try {
    RunConfig cfg(active->schema);
    if (config_opt->count() > 0) cfg.load(fs::path(config_path));
    for (const auto& [key, option] : active->options) {
      if (option->count() > 0) cfg.set(key, active->given[key]);
    }
    if (seed_opt->count() > 0) cfg.set("seed", seed_text);
    if (threads_opt->count() > 0) cfg.set("threads", threads_text);
    cfg.require_complete();
    return active->run(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace trendboot::cli
