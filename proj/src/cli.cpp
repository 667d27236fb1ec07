#include "spherecover/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "spherecover/covering.hpp"
#include "spherecover/csv.hpp"
#include "spherecover/errors.hpp"
#include "spherecover/exponent.hpp"
#include "spherecover/model_io.hpp"
#include "spherecover/rate.hpp"

namespace spherecover::cli {

namespace {

struct RunConfig {
  std::string command;
  std::string model_path;
  std::optional<double> D;
  std::optional<double> R;
  std::optional<double> r;
  std::string grid;
  std::string axis = "r";
  std::string units = "nats";
  std::string input_units = "nats";
  std::size_t mesh = 0;
  std::string n_list;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string out;
  bool exhaustive = false;
  std::string generator = "type_covering";
  std::vector<std::string> eval_p;
};

class Emitter {
 public:
  explicit Emitter(const RunConfig& cfg) : bits_(cfg.units == "bits"), input_bits_(cfg.input_units == "bits") {}

  /// Output value in the requested units.
  double out(double nats) const { return bits_ ? nats / std::numbers::ln2 : nats; }
  /// Input value converted to nats.
  double in(double value) const { return input_bits_ ? value * std::numbers::ln2 : value; }
  std::string num(double nats) const { return csv::format_number(out(nats)); }

 private:
  bool bits_;
  bool input_bits_;
};

double require(const std::optional<double>& v, const char* flag) {
  if (!v) throw usage_error(std::string("missing required flag ") + flag);
  return *v;
}

Model require_model(const RunConfig& cfg) {
  if (cfg.model_path.empty()) throw usage_error("missing required flag --model");
  return load_model(cfg.model_path);
}

std::string regime_label(const ExponentResult& res) {
  return res.boundary ? "boundary" : std::string(to_string(res.regime));
}

std::string join_law(const std::optional<Distribution>& q) {
  if (!q) return "";
  std::string s;
  for (std::size_t i = 0; i < q->size(); ++i) {
    if (i) s += ";";
    s += csv::format_number((*q)[i]);
  }
  return s;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v <= 0) throw usage_error("--n expects positive integers, got \"" + item + "\"");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw usage_error("--n list is empty");
  return out;
}

std::vector<double> parse_law(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(csv::parse_number(item));
  return out;
}

/// Values of --grid, or the single scalar flag when there is no grid.
std::vector<double> axis_values(const RunConfig& cfg, const std::optional<double>& scalar, const char* flag,
                                const Emitter& em) {
  std::vector<double> values;
  if (!cfg.grid.empty()) {
    values = parse_grid(cfg.grid);
  } else if (scalar) {
    values.push_back(*scalar);
  } else {
    throw usage_error(std::string("need ") + flag + " or --grid");
  }
  for (double& v : values) v = em.in(v);
  return values;
}

csv::Document base_document(const RunConfig& cfg, const std::string& hash, const std::string& units) {
  csv::Document doc;
  doc.metadata = {{"command", cfg.command}, {"model_hash", hash}, {"units", units}};
  return doc;
}

// --- commands ----------------------------------------------------------------

csv::Document cmd_rate(const RunConfig& cfg) {
  const Model model = require_model(cfg);
  const Emitter em(cfg);
  std::vector<double> grid = cfg.grid.empty() ? std::vector<double>{} : parse_grid(cfg.grid);
  if (cfg.grid.empty()) grid.push_back(require(cfg.D, "--D"));
  auto doc = base_document(cfg, model_hash(model), cfg.units);
  doc.header = {"D", "rate", "lambda"};
  if (grid.empty()) return doc;
  const auto curve = rate_curve(model, grid);
  for (const auto& pt : curve.points)
    doc.rows.push_back({csv::format_number(pt.D), em.num(pt.rate_nats), em.num(pt.lambda)});
  return doc;
}

csv::Document cmd_exponent(const RunConfig& cfg) {
  const Model model = require_model(cfg);
  const Emitter em(cfg);
  const double D = require(cfg.D, "--D");
  if (cfg.R.has_value() == cfg.r.has_value()) throw usage_error("give exactly one of --R or --r");
  const bool concentration = cfg.r.has_value();
  const double axis = em.in(concentration ? *cfg.r : *cfg.R);
  const auto res = exponent(model, concentration ? -axis : axis, D);
  auto doc = base_document(cfg, model_hash(model), cfg.units);
  doc.header = {concentration ? "r" : "R", "exponent", "regime", "rate_at_minimizer", "minimizer"};
  doc.rows.push_back({em.num(axis), em.num(res.value_nats), regime_label(res),
                      res.minimizer ? em.num(res.constraint_value) : "nan", join_law(res.minimizer)});
  return doc;
}

csv::Document cmd_exponent_sweep(const RunConfig& cfg) {
  const Model model = require_model(cfg);
  const Emitter em(cfg);
  const double D = require(cfg.D, "--D");
  if (cfg.axis != "r" && cfg.axis != "R") throw usage_error("--axis must be r or R");
  const bool concentration = cfg.axis == "r";
  if (cfg.grid.empty()) throw usage_error("exponent-sweep needs --grid");
  std::vector<double> grid = parse_grid(cfg.grid);
  for (double& v : grid) v = em.in(v);
  const auto curve = exponent_curve(model, D, grid, concentration);
  auto doc = base_document(cfg, model_hash(model), cfg.units);
  if (concentration) {
    doc.metadata.emplace_back("r_infinite", em.num(curve.r_infinite));
    doc.metadata.emplace_back("r_zero", em.num(curve.r_zero));
  } else {
    doc.metadata.emplace_back("R_zero", em.num(-curve.r_zero));
    doc.metadata.emplace_back("R_infinite", em.num(-curve.r_infinite));
  }
  doc.header = {cfg.axis, "exponent", "regime"};
  for (const auto& s : curve.samples)
    doc.rows.push_back({em.num(s.axis), em.num(s.result.value_nats), regime_label(s.result)});
  return doc;
}

csv::Document cmd_hoeffding(const RunConfig& cfg) {
  // Hypothesis model: P holds P1 and M holds P0.
  const Model model = require_model(cfg);
  const Emitter em(cfg);
  const auto m = model.M().values();
  const Distribution p0(std::vector<double>(m.begin(), m.end()));
  const auto& p1 = model.P();
  auto doc = base_document(cfg, model_hash(model), cfg.units);
  doc.header = {"r", "exponent", "regime"};
  for (double r : axis_values(cfg, cfg.r, "--r", em)) {
    const auto res = hoeffding_exponent(p0, p1, r);
    doc.rows.push_back({em.num(r), em.num(res.value_nats), regime_label(res)});
  }
  return doc;
}

csv::Document cmd_marton(const RunConfig& cfg) {
  const Model model = require_model(cfg);
  const Emitter em(cfg);
  const double D = require(cfg.D, "--D");
  auto doc = base_document(cfg, model_hash(model), cfg.units);
  doc.header = {"R", "exponent", "regime"};
  for (double R : axis_values(cfg, cfg.R, "--R", em)) {
    const auto res = marton_exponent(model.P(), model.rho(), R, D);
    doc.rows.push_back({em.num(R), em.num(res.value_nats), regime_label(res)});
  }
  return doc;
}

csv::Document cmd_concentration(const RunConfig& cfg) {
  const Model model = require_model(cfg);
  const Emitter em(cfg);
  const double D = require(cfg.D, "--D");
  auto doc = base_document(cfg, model_hash(model), cfg.units);
  doc.header = {"r", "exponent", "regime", "talagrand"};
  for (double r : axis_values(cfg, cfg.r, "--r", em)) {
    const auto res = concentration_exponent(model.P(), model.rho(), r, D);
    doc.rows.push_back({em.num(r), em.num(res.value_nats), regime_label(res), em.num(talagrand_bound(r, D))});
  }
  return doc;
}

std::vector<std::string> report_row(const CoverReport& rep) {
  return {std::to_string(rep.n),
          csv::format_number(rep.D),
          csv::format_number(rep.R_nats),
          csv::format_number(rep.mass_log),
          csv::format_number(rep.error_prob),
          csv::format_number(rep.empirical_exponent),
          std::to_string(rep.seed),
          rep.generator};
}

csv::Document cmd_simulate(const RunConfig& cfg) {
  if (cfg.units != "nats") throw usage_error("simulate reports are always in nats");
  const Model model = require_model(cfg);
  const Emitter em(cfg);
  const double D = require(cfg.D, "--D");
  if (cfg.R.has_value() == cfg.r.has_value()) throw usage_error("give exactly one of --R or --r");
  const double R = cfg.R ? em.in(*cfg.R) : -em.in(*cfg.r);
  if (cfg.n_list.empty()) throw usage_error("missing required flag --n");
  const auto ns = parse_sizes(cfg.n_list);

  auto doc = base_document(cfg, model_hash(model), "nats");
  doc.header = {"n", "D", "R_nats", "mass_log", "error_prob", "empirical_exponent", "seed", "generator"};

  if (cfg.exhaustive) {
    for (std::size_t n : ns) {
      auto res = exhaustive_optimum(model, n, R, D);
      doc.rows.push_back(report_row(res.report));
    }
    return doc;
  }
  if (cfg.generator == "greedy") {
    for (std::size_t n : ns) {
      const auto book = greedy_codebook(model, n, R, D);
      auto rep = blowup_error(model, book, D);
      rep.R_nats = R;
      rep.generator = "greedy";
      doc.rows.push_back(report_row(rep));
    }
    return doc;
  }
  if (cfg.generator != "type_covering") throw usage_error("--generator must be type_covering or greedy");

  if (!cfg.eval_p.empty()) {
    // One codebook per n, evaluated under the model's P and every --eval-P law.
    std::vector<Distribution> sources{model.P()};
    for (const auto& text : cfg.eval_p) sources.emplace_back(parse_law(text));
    doc.header.push_back("eval_P");
    doc.header.push_back("codebook_hash");
    for (std::size_t n : ns) {
      const std::uint64_t s = trial_seed(cfg.seed, n, 0);
      const auto book = type_covering_codebook(model, n, R, D, s);
      const auto reports = universality_check(model, book, D, sources);
      for (std::size_t i = 0; i < reports.size(); ++i) {
        auto rep = reports[i];
        rep.R_nats = R;
        rep.seed = s;
        rep.generator = "type_covering";
        auto row = report_row(rep);
        row.push_back(join_law(sources[i]));
        row.push_back(book.hash());
        doc.rows.push_back(std::move(row));
      }
    }
    return doc;
  }

  const auto sweep = empirical_exponent_sweep(model, ns, R, D, cfg.trials, cfg.seed);
  doc.metadata.emplace_back("trials", std::to_string(cfg.trials));
  doc.metadata.emplace_back("slope", csv::format_number(sweep.slope));
  for (const auto& rep : sweep.reports) doc.rows.push_back(report_row(rep));
  return doc;
}

csv::Document cmd_oracle(const RunConfig& cfg) {
  const Model model = require_model(cfg);
  const Emitter em(cfg);
  const double D = require(cfg.D, "--D");
  if (cfg.mesh == 0) throw usage_error("missing required flag --mesh");
  auto doc = base_document(cfg, model_hash(model), cfg.units);
  if (!cfg.R && !cfg.r) {
    doc.header = {"D", "rate_oracle"};
    doc.rows.push_back({csv::format_number(D), em.num(rate_oracle(model, D, cfg.mesh))});
    return doc;
  }
  if (cfg.R && cfg.r) throw usage_error("give at most one of --R or --r");
  const double axis = em.in(cfg.r ? *cfg.r : *cfg.R);
  doc.header = {cfg.r ? "r" : "R", "exponent_oracle"};
  doc.rows.push_back({em.num(axis), em.num(exponent_oracle(model, cfg.r ? -axis : axis, D, cfg.mesh))});
  return doc;
}

void apply_thread_cap() {
  const char* env = std::getenv("SPHERECOVER_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long cap = std::strtol(env, &end, 10);
  if (*end != '\0' || cap <= 0) throw usage_error(std::string("SPHERECOVER_THREADS must be a positive integer, got ") + env);
  omp_set_num_threads(static_cast<int>(std::min<long>(cap, omp_get_num_procs())));
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> values;
  if (spec.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
      try {
        parts.push_back(csv::parse_number(item));
      } catch (const Error&) {
        throw usage_error("bad grid \"" + spec + "\": expected a:b:step");
      }
    }
    if (parts.size() != 3 || !std::isfinite(parts[0]) || !std::isfinite(parts[1]) || !(parts[2] > 0.0))
      throw usage_error("bad grid \"" + spec + "\": expected a:b:step with step > 0");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (b < a) return values;
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      // Strip the accumulated binary noise so that 0.6109 + 3*0.001 prints as 0.6139.
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", a + static_cast<double>(i) * step);
      values.push_back(std::strtod(buf, nullptr));
    }
    return values;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(csv::parse_number(item));
    } catch (const Error&) {
      throw usage_error("bad grid value \"" + item + "\"");
    }
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Sphere-covering error exponents and mass-tilted rate functions", "spherecover"};
  app.require_subcommand(1, 1);

  auto model_flag = [&](CLI::App* sub) { sub->add_option("--model", cfg.model_path, "model JSON file"); };
  auto units_flags = [&](CLI::App* sub) {
    sub->add_option("--units", cfg.units, "output units")->check(CLI::IsMember({"bits", "nats"}));
    sub->add_option("--input-units", cfg.input_units, "units of --R, --r and rate grids")
        ->check(CLI::IsMember({"bits", "nats"}));
  };
  auto out_flag = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "output path (default stdout)"); };

  struct Entry {
    const char* name;
    const char* help;
    csv::Document (*fn)(const RunConfig&);
  };
  const std::vector<Entry> commands = {
      {"rate", "rate function R(D;P,M) on a D grid", cmd_rate},
      {"exponent", "error exponent at one R (or r = -R)", cmd_exponent},
      {"exponent-sweep", "error exponent over a grid of r (or R)", cmd_exponent_sweep},
      {"hoeffding", "hypothesis-testing exponent; model P = P1, M = P0", cmd_hoeffding},
      {"marton", "lossy-compression exponent with counting mass", cmd_marton},
      {"concentration", "converse concentration exponent with M = P", cmd_concentration},
      {"simulate", "finite-n covering simulation", cmd_simulate},
      {"oracle", "brute-force rate or exponent on a mesh", cmd_oracle},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    model_flag(sub);
    units_flags(sub);
    out_flag(sub);
    sub->add_option("--D", cfg.D, "per-letter distortion level");
    sub->add_option("--R", cfg.R, "mass rate");
    sub->add_option("--r", cfg.r, "concentration rate, R = -r");
    sub->add_option("--grid", cfg.grid, "a:b:step or comma list");
    sub->add_option("--axis", cfg.axis, "sweep axis: r or R");
    sub->add_option("--mesh", cfg.mesh, "oracle mesh");
    sub->add_option("--n", cfg.n_list, "comma-separated block lengths");
    sub->add_option("--trials", cfg.trials, "random codebooks per n");
    sub->add_option("--seed", cfg.seed, "base seed");
    sub->add_flag("--exhaustive", cfg.exhaustive, "exact optimum over all codebooks");
    sub->add_option("--generator", cfg.generator, "type_covering or greedy");
    sub->add_option("--eval-P", cfg.eval_p, "extra source law for the universality check, e.g. 0.5,0.5");
    sub->callback([&cfg, name = std::string(c.name)] { cfg.command = name; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::usage);
  }

  try {
    apply_thread_cap();
    csv::Document doc;
    for (const auto& c : commands)
      if (cfg.command == c.name) doc = c.fn(cfg);
    const std::string text = doc.str();
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) throw usage_error("cannot write " + cfg.out);
      file << text;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::non_convergence);
  }
}

}  // namespace spherecover::cli
