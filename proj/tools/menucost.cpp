// menucost command line: model closed forms, band simulations, synthetic
// panels, panel analysis and regressions.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "menucost/analyze.hpp"
#include "menucost/band_sim.hpp"
#include "menucost/io.hpp"
#include "menucost/model.hpp"
#include "menucost/regression.hpp"
#include "menucost/runner.hpp"
#include "menucost/synth.hpp"

namespace fs = std::filesystem;
using namespace menucost;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string format = "csv";
};

io::KeyValues load_kv(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("no such file '" + path.string() + "'");
  try {
    return io::KeyValues::load(path);
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void reject_unused(const io::KeyValues& kv, const fs::path& path) {
  const auto unused = kv.unused();
  if (unused.empty()) return;
  std::string list;
  for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
  throw DataError(path.string() + ": unknown key(s) " + list);
}

ModelParams<double> params_from(const io::KeyValues& kv, ModelParams<double> p = {}) {
  p.alpha = kv.number("alpha", p.alpha);
  p.beta = kv.number("beta", p.beta);
  p.a = kv.number("a", p.a);
  p.b = kv.number("b", p.b);
  p.c = kv.number("c", p.c);
  p.gamma = kv.number("gamma", p.gamma);
  p.sigma = kv.number("sigma", p.sigma);
  if (auto v = kv.number("u_min")) p.u_min = *v;
  if (auto v = kv.number("u_max")) p.u_max = *v;
  return p;
}

ModelParams<double> load_params(const fs::path& path) {
  const auto kv = load_kv(path);
  ModelParams<double> p;
  try {
    p = params_from(kv);
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  reject_unused(kv, path);
  return p;
}

SynthConfig synth_from(const io::KeyValues& kv) {
  SynthConfig c;
  c.n_stores = kv.integer("n_stores", c.n_stores);
  c.n_products = kv.integer("n_products", c.n_products);
  c.n_weeks = kv.integer("n_weeks", c.n_weeks);
  c.beta_min = kv.number("beta_min", c.beta_min);
  c.beta_max = kv.number("beta_max", c.beta_max);
  c.beta_product_weight = kv.number("beta_product_weight", c.beta_product_weight);
  c.base = params_from(kv, c.base);
  c.sigma_dispersion = kv.number("sigma_dispersion", c.sigma_dispersion);
  c.demand_noise = kv.number("demand_noise", c.demand_noise);
  c.target_volume = kv.number("target_volume", c.target_volume);
  c.zero_sale_prob = kv.number("zero_sale_prob", c.zero_sale_prob);
  c.price_unit = kv.number("price_unit", c.price_unit);
  c.categories = kv.integer("categories", c.categories);
  c.producers = kv.integer("producers", c.producers);
  c.share_private_label = kv.number("share_private_label", c.share_private_label);
  c.share_storable = kv.number("share_storable", c.share_storable);
  c.share_multipack = kv.number("share_multipack", c.share_multipack);
  c.zones = kv.integer("zones", c.zones);
  c.sale_prob = kv.number("sale_prob", c.sale_prob);
  c.sale_depth_min = kv.number("sale_depth_min", c.sale_depth_min);
  c.sale_depth_max = kv.number("sale_depth_max", c.sale_depth_max);
  c.coupon_prob = kv.number("coupon_prob", c.coupon_prob);
  c.nine_ending = kv.integer("nine_ending", c.nine_ending ? 1 : 0) != 0;
  c.share_partial = kv.number("share_partial", c.share_partial);
  c.wholesale_noise = kv.number("wholesale_noise", c.wholesale_noise);
  c.seed = static_cast<std::uint64_t>(kv.integer("seed", static_cast<std::int64_t>(c.seed)));
  return c;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const double v = io::parse_number(item);
      if (std::isnan(v)) throw DataError("empty");
      out.push_back(v);
    } catch (const DataError&) {
      throw UsageError("not a number list: '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

// Writes to a file when a path is given, otherwise to stdout.
void emit(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
          const std::string& out, io::Format format) {
  if (!out.empty()) {
    io::TableWriter w(out, header, format);
    for (const auto& r : rows) w.row(r);
    w.close();
    return;
  }
  const char d = io::delimiter(format);
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? std::string(1, d) : "") << io::quote_field(r[i], d);
    std::cout << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::vector<std::string> sim_row(const SimResult& r) {
  using io::format_number;
  return {format_number(r.nominal_halfwidth), format_number(r.effective_trigger), std::to_string(r.trigger_steps),
          std::to_string(r.horizon), std::to_string(r.adjustments), format_number(r.adjustment_rate),
          format_number(r.mean_abs_price_change), format_number(r.flow_loss), format_number(r.menu_cost_paid),
          format_number(r.avg_cost_rate), format_number(r.mean_interval), format_number(r.interval_se)};
}

const std::vector<std::string> kSimHeader = {"halfwidth", "effective_trigger", "trigger_steps", "horizon",
                                             "adjustments", "adjustment_rate", "mean_abs_price_change",
                                             "flow_loss", "menu_cost_paid", "avg_cost_rate", "mean_interval",
                                             "interval_se"};

RegressionSpec load_spec(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("no such file '" + path.string() + "'");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(ss.str());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void run_regress(const fs::path& input, const std::string& preset_name, const std::string& spec_file,
                 const fs::path& out, unsigned threads, io::Format format) {
  if (!fs::is_directory(input)) throw DataError("input directory '" + input.string() + "' does not exist");
  if (preset_name == "per_product") {
    const auto path = table_path(input, "stats", format);
    if (!fs::exists(path)) throw DataError("missing '" + path.string() + "'");
    write_per_product(per_product_regressions(io::read_dataset(path, format)), out, format);
    return;
  }
  RegressionSpec spec;
  if (!spec_file.empty()) {
    spec = load_spec(spec_file);
  } else {
    try {
      spec = preset(preset_name);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  write_results(run_on_directory(input, spec, threads, format), out, format);
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Menu-cost pricing model, band simulation and scanner-panel analysis"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed for commands that draw random numbers");
  app.add_option("--threads", g.threads, "Upper bound on worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "tsv"}));

  // model
  auto* model = app.add_subcommand("model", "Closed-form model quantities");
  model->require_subcommand(1);
  auto* eval = model->add_subcommand("eval", "Print closed forms as name,value rows");
  std::string params_file;
  double u = 0;
  eval->add_option("--params", params_file, "key = value parameter file")->required();
  eval->add_option("--u", u, "Disturbance for the price / output / gain rows");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Band-policy simulations");
  simulate->require_subcommand(1);
  auto* band = simulate->add_subcommand("band", "Simulate a grid of band half-widths");
  std::string grid = "auto";
  std::uint64_t horizon = 1000000;
  std::string sim_out;
  band->add_option("--params", params_file)->required();
  band->add_option("--grid", grid, "Comma-separated half-widths or 'auto'");
  band->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  band->add_option("--out", sim_out, "Output file (stdout when absent)");
  auto* sweep = simulate->add_subcommand("sweep", "Closed-form band and simulated dynamics across beta");
  std::string betas;
  double small_threshold = 0.1;
  std::string unit = "shock";
  sweep->add_option("--params", params_file)->required();
  sweep->add_option("--betas", betas, "Comma-separated demand slopes")->required();
  sweep->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  sweep->add_option("--small-threshold", small_threshold, "Size at or below which a change is small");
  sweep->add_option("--unit", unit, "Units of change size")->check(CLI::IsMember({"price", "shock"}));
  sweep->add_option("--out", sim_out);
  for (auto* sc : {band, sweep}) sc->add_option("--seed", g.seed);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic movement panel");
  std::string config_file, out_dir;
  synth->add_option("--config", config_file, "key = value synth config (defaults when absent)");
  synth->add_option("--out", out_dir)->required();
  synth->add_option("--seed", g.seed);

  // analyze
  auto* an = app.add_subcommand("analyze", "Price-change statistics over a movement file");
  AnalyzeOptions ao;
  std::string rule = "abs:10", mode = "survived2w", deciles = "product_store";
  std::string input, meta, stores, calendar, aliases, tmp;
  an->add_option("--input", input, "movement CSV")->required();
  an->add_option("--meta", meta, "product metadata CSV");
  an->add_option("--stores", stores, "store attributes CSV");
  an->add_option("--calendar", calendar, "week,holiday[,month,year] CSV");
  an->add_option("--aliases", aliases, "old_upc,new_upc CSV");
  an->add_option("--rule", rule, "Small-change rule: abs:<cents>, pct:<percent>, kappa:<k>");
  an->add_option("--mode", mode, "Event definition")->check(CLI::IsMember({"survived2w", "all"}));
  an->add_flag("--exclude-leq-2c", ao.filters.exclude_leq_2c, "Drop changes of 2 cents or less");
  an->add_flag("--exclude-coupon", ao.filters.exclude_coupon_adjacent, "Drop changes next to coupon weeks");
  an->add_flag("--exclude-sale-bb", ao.filters.exclude_sale_bounceback, "Drop sale and bounce-back changes");
  an->add_flag("--regular-only", ao.filters.regular_only, "Detect changes on the regular-price series");
  an->add_flag("--single-units-only", ao.single_units_only, "Drop multi-pack rows");
  an->add_flag("--weeks-table", ao.weeks_table, "Write weeks table for any-change regressions");
  an->add_option("--deciles", deciles)->check(CLI::IsMember({"product_store", "event"}));
  an->add_option("--sale-depth", ao.sales.depth_pct, "Sale depth in percent");
  an->add_option("--sale-window", ao.sales.window_weeks, "Weeks allowed for the price to return");
  an->add_option("--sale-tolerance", ao.sales.return_tolerance, "Cents tolerance for the return");
  an->add_option("--rolling-window", ao.rolling_window)->check(CLI::PositiveNumber);
  an->add_option("--sort-chunk-rows", ao.sort_chunk_rows, "Rows per external-sort run")->check(CLI::PositiveNumber);
  an->add_option("--tmp", tmp, "Directory for temporary files");
  an->add_option("--out", out_dir)->required();

  // regress
  auto* reg = app.add_subcommand("regress", "Fixed-effects regressions over analyze output");
  std::string preset_name, spec_file, reg_out = "results.csv";
  bool list_presets = false;
  reg->add_flag("--list-presets", list_presets);
  reg->add_option("--input", input, "analyze output directory");
  auto* preset_opt = reg->add_option("--preset", preset_name);
  reg->add_option("--spec", spec_file, "key: value spec file")->excludes(preset_opt);
  reg->add_option("--out", reg_out);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "synth -> analyze -> regress in one run");
  std::string presets = "baseline,controls,controls_nine,regular_only";
  pipe->add_option("--config", config_file, "synth config; may also set rule and mode");
  pipe->add_option("--out", out_dir)->required();
  pipe->add_option("--presets", presets, "Comma-separated presets");
  pipe->add_option("--seed", g.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  const auto warn = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  try {
    const io::Format format = io::parse_format(g.format);
    const std::uint64_t seed = g.seed.value_or(1);

    if (eval->parsed()) {
      const auto p = load_params(params_file);
      const auto cs = comparative_statics(p);
      std::vector<std::vector<std::string>> rows = {
          {"passthrough", io::format_number(passthrough(p))},
          {"sticky_price", io::format_number(sticky_price(p))},
          {"optimal_price", io::format_number(optimal_price(p, u))},
          {"disturbance_free_output", io::format_number(disturbance_free_output(p))},
          {"optimal_output", io::format_number(optimal_output(p, u))},
          {"gain_flexible", io::format_number(profit_gain_flexible(p, u))},
          {"gain_sticky", io::format_number(profit_gain_sticky(p, u))},
          {"theta", io::format_number(theta(p))},
          {"band_halfwidth", io::format_number(band_halfwidth(p))},
          {"dtheta_dbeta", io::format_number(cs.dtheta_dbeta)},
          {"dh_dtheta", io::format_number(cs.dh_dtheta)},
          {"doutput_dbeta", io::format_number(cs.dY_dbeta)},
          {"dh_dbeta", io::format_number(cs.dh_dbeta)}};
      emit({"name", "value"}, rows, "", format);
    } else if (band->parsed()) {
      const auto p = load_params(params_file);
      const auto grid_points = grid == "auto" ? auto_grid(p) : parse_list(grid);
      const auto search = optimize_band_numeric(p, grid_points, horizon, seed, g.threads);
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : search.results) rows.push_back(sim_row(r));
      emit(kSimHeader, rows, sim_out, format);
      std::cerr << "best halfwidth " << search.best_halfwidth << " (closed form " << band_halfwidth(p) << ")\n";
    } else if (sweep->parsed()) {
      const auto p = load_params(params_file);
      const auto res = beta_sweep_experiment(p, parse_list(betas), horizon, seed, small_threshold,
                                             unit == "price" ? SizeUnit::price : SizeUnit::shock, g.threads);
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : res)
        rows.push_back({io::format_number(r.beta), io::format_number(r.output), io::format_number(r.theta),
                        io::format_number(r.h_hat), io::format_number(r.effective_trigger),
                        io::format_number(r.adjustment_rate), io::format_number(r.mean_abs_change),
                        io::format_number(r.mean_abs_gap), io::format_number(r.share_small)});
      emit({"beta", "output", "theta", "h_hat", "effective_trigger", "adjustment_rate", "mean_abs_change",
            "mean_abs_gap", "share_small"},
           rows, sim_out, format);
    } else if (synth->parsed()) {
      SynthConfig cfg;
      if (!config_file.empty()) {
        const auto kv = load_kv(config_file);
        try {
          cfg = synth_from(kv);
        } catch (const std::invalid_argument& e) {
          throw DataError(config_file + ": " + e.what());
        }
        reject_unused(kv, config_file);
      }
      if (g.seed) cfg.seed = *g.seed;
      try {
        cfg.validate();
      } catch (const ParameterError& e) {
        throw DataError(e.what());
      }
      const auto panel = write_synth_panel(cfg, out_dir, g.threads);
      std::cerr << "wrote " << panel.rows << " rows to " << (fs::path(out_dir) / "movement.csv").string() << '\n';
    } else if (an->parsed()) {
      ao.input = input;
      ao.meta = meta;
      ao.stores = stores;
      ao.calendar = calendar;
      ao.aliases = aliases;
      ao.temp_dir = tmp;
      ao.out = out_dir;
      ao.format = format;
      try {
        ao.rule = SmallChangeRule::parse(rule);
        ao.rule.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      ao.mode = mode == "all" ? DetectMode::all_adjacent : DetectMode::survived_2w;
      ao.decile_weighting = deciles == "event" ? DecileWeighting::event : DecileWeighting::product_store;
      for (const auto& f : {ao.input, ao.meta, ao.stores, ao.calendar, ao.aliases})
        if (!f.empty() && !fs::exists(f)) throw DataError("no such file '" + f.string() + "'");
      const auto s = analyze(ao, warn);
      std::cerr << s.rows << " rows, " << s.series << " product-stores, " << s.events << " events, " << s.small
                << " small\n";
    } else if (reg->parsed()) {
      if (list_presets) {
        for (const auto& n : preset_names()) std::cout << n << '\n';
        return 0;
      }
      if (input.empty()) throw UsageError("regress needs --input");
      if (preset_name.empty() && spec_file.empty()) throw UsageError("regress needs --preset or --spec");
      run_regress(input, preset_name, spec_file, reg_out, g.threads, format);
    } else if (pipe->parsed()) {
      SynthConfig cfg;
      std::string p_rule = "abs:10", p_mode = "survived2w";
      if (!config_file.empty()) {
        const auto kv = load_kv(config_file);
        try {
          cfg = synth_from(kv);
          p_rule = kv.get("rule").value_or(p_rule);
          p_mode = kv.get("mode").value_or(p_mode);
        } catch (const std::invalid_argument& e) {
          throw DataError(config_file + ": " + e.what());
        }
        reject_unused(kv, config_file);
      }
      if (g.seed) cfg.seed = *g.seed;
      try {
        cfg.validate();
      } catch (const ParameterError& e) {
        throw DataError(e.what());
      }
      const fs::path root = out_dir;
      const fs::path data = root / "data";
      const fs::path analysis = root / "analysis";
      write_synth_panel(cfg, data, g.threads);
      AnalyzeOptions po;
      po.input = data / "movement.csv";
      po.meta = data / "meta.csv";
      po.stores = data / "stores.csv";
      po.out = analysis;
      po.weeks_table = true;
      po.format = format;
      try {
        po.rule = SmallChangeRule::parse(p_rule);
        po.rule.validate();
      } catch (const std::invalid_argument& e) {
        throw DataError(config_file + ": " + e.what());
      }
      if (p_mode != "survived2w" && p_mode != "all") throw DataError(config_file + ": mode must be survived2w or all");
      po.mode = p_mode == "all" ? DetectMode::all_adjacent : DetectMode::survived_2w;
      analyze(po, warn);
      std::vector<ResultRow> all;
      std::stringstream ss(presets);
      std::string name;
      while (std::getline(ss, name, ',')) {
        if (name.empty()) continue;
        RegressionSpec spec;
        try {
          spec = preset(name);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what() + std::string(" (known: ") + join(preset_names()) + ")");
        }
        auto rows = run_on_directory(analysis, spec, g.threads, format);
        all.insert(all.end(), rows.begin(), rows.end());
      }
      write_results(all, root / table_file("results", format), format);
      std::cerr << "wrote " << (root / table_file("results", format)).string() << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const fe::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return 0;
}
