#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "kw/experiments.hpp"

namespace kw {

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::invalid_argument("cannot open output file " + path);
  os << text;
  if (!text.empty() && text.back() != '\n') os << '\n';
}

std::string events_json(const std::vector<EventRow>& rows, const std::string& model) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["model"] = model;
    o["c0"] = r.c0;
    o["n"] = r.n;
    o["k"] = r.k;
    o["reps"] = r.reps;
    o["hits"] = r.hits;
    o["freq"] = r.freq;
    o["bound"] = r.bound;
    o["vacuous"] = r.vacuous;
    arr.push_back(o);
  }
  return arr.dump(2);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Rate experiments for shape-constrained distribution function estimates"};
  app.set_config("--config", "", "flat key = value file; flags override it");
  app.require_subcommand(1);

  ExperimentConfig c;
  c.n_grid = {512, 1024, 2048, 4096, 8192};
  std::string case_name = "convex";
  std::vector<std::string> lemma_models;

  app.add_option("--model", c.model, "catalog model")->check(CLI::IsMember(catalog_names()));
  app.add_option("--params", c.params, "model parameters")->delimiter(',');
  app.add_option("--n-grid", c.n_grid, "ascending sample sizes")->delimiter(',');
  app.add_option("--reps", c.replicates, "replicates per n");
  app.add_option("--seed", c.base_seed, "base seed");
  app.add_option("--c0", c.c0, "k rule constant");
  app.add_option("--c0-sweep", c.c0_sweep, "C0 values for events")->delimiter(',');
  app.add_option("--tau-q", c.tau_q, "tau as a quantile of F");
  app.add_option("--out", c.out, "output path (stdout if empty)");
  app.add_option("--workers", c.workers, "worker threads");
  app.add_option("--format", c.format, "csv or json");

  auto* rate = app.add_subcommand("rate", "sup-norm rate experiment");
  rate->add_option("--case", case_name, "monotone or convex")->check(CLI::IsMember({"monotone", "convex"}));
  rate->fallthrough();
  auto* events = app.add_subcommand("events", "event frequency over the C0 sweep");
  events->add_option("--case", case_name, "monotone or convex")->check(CLI::IsMember({"monotone", "convex"}));
  events->fallthrough();
  auto* lemmas = app.add_subcommand("lemmas", "inequality ledger and tail dominance checks");
  lemmas->add_option("--models", lemma_models, "models to check")->delimiter(',');
  lemmas->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  c.target = case_name == "monotone" ? Target::monotone : Target::convex;

  try {
    if (*rate || *events) validate(c);
    if (*lemmas) {
      if (c.format != "json" && c.format != "csv") throw std::invalid_argument("format must be csv or json");
      if (lemma_models.empty()) {
        if (app.get_option("--model")->count() > 0)
          lemma_models = {c.model};
        else
          lemma_models = {"exponential", "truncated-exponential", "shifted-power", "beta-like"};
      }
      for (const auto& m : lemma_models) make_model(m, m == c.model ? c.params : std::vector<double>{}, c.tau_q);
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*rate) {
      RateResult r = c.target == Target::monotone ? run_monotone_rate(c) : run_convex_rate(c);
      emit(c.format == "json" ? rate_summary_json(r) : rate_csv(r), c.out);
      if (c.format == "csv") std::cerr << rate_summary_json(r) << '\n';
      return 0;
    }
    if (*events) {
      std::vector<EventRow> rows = run_event_frequency(c);
      emit(c.format == "json" ? events_json(rows, c.model) : events_csv(rows, c.target), c.out);
      return 0;
    }
    LemmaReport rep = run_lemma_suite(c, lemma_models);
    emit(lemma_json(rep), c.out);
    for (const auto& e : rep.checks)
      if (!e.pass) std::cerr << "FAIL " << e.name << " lhs=" << e.lhs << " rhs=" << e.rhs << '\n';
    return rep.all_pass() ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace kw
