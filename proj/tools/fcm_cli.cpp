// Command-line front end: data generation, learning, evaluation, and experiments.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "fcm/harness.hpp"
#include "fcm/rng.hpp"

namespace {

using namespace fcm;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct ActivationOpts {
  std::string family = "sigmoid";
  double lambda = 1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--activation", family, "sigmoid or tanh")->capture_default_str();
    cmd->add_option("--lambda", lambda, "activation shape parameter")->capture_default_str();
  }
  ActivationSpec spec() const { return ActivationSpec(family_from_string(family), lambda); }
};

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn fuzzy cognitive maps from noisy time series"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "random map, initial states, and (noisy) response data");
  std::string gen_preset, gen_out;
  std::size_t gen_n = 20, gen_m = 5, gen_k = 100;
  double gen_density = 0.2, gen_mu = 0.0, gen_sigma = 0.0;
  std::uint64_t gen_seed = 0;
  ActivationOpts gen_act;
  gen_act.lambda = 5.0;
  gen->add_option("--preset", gen_preset, "C20, C40, C100 or C200 (sets n, density, lambda, m, k)");
  gen->add_option("--n", gen_n)->capture_default_str();
  gen->add_option("--density", gen_density)->capture_default_str();
  gen->add_option("--m", gen_m, "number of sequences")->capture_default_str();
  gen->add_option("--k", gen_k, "steps per sequence")->capture_default_str();
  gen->add_option("--mu", gen_mu, "noise mean")->capture_default_str();
  gen->add_option("--sigma", gen_sigma, "noise standard deviation")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->required();
  gen_act.add(gen);

  // learn
  auto* lrn = app.add_subcommand("learn", "learn a weight matrix with the convex learner");
  std::string lrn_data, lrn_out;
  double lrn_alpha = 0.0, lrn_beta = 0.0;
  unsigned lrn_threads = 1;
  ActivationOpts lrn_act;
  LearnConfig lrn_cfg;
  lrn->add_option("--data", lrn_data, "time-series CSV")->required();
  lrn->add_option("--alpha", lrn_alpha, "entropy weight")->capture_default_str();
  lrn->add_option("--beta", lrn_beta, "L1 weight")->capture_default_str();
  lrn->add_option("--clamp-eps", lrn_cfg.clamp_eps)->capture_default_str();
  lrn->add_option("--max-iters", lrn_cfg.max_iters)->capture_default_str();
  lrn->add_option("--grad-tol", lrn_cfg.grad_tol)->capture_default_str();
  lrn->add_option("--obj-tol", lrn_cfg.obj_tol)->capture_default_str();
  lrn->add_option("--threads", lrn_threads)->capture_default_str();
  lrn->add_option("--out", lrn_out, "weights file (.json or .csv)")->required();
  lrn_act.add(lrn);

  // pso
  auto* pso = app.add_subcommand("pso", "learn a weight matrix with the particle swarm baseline");
  std::string pso_data, pso_out;
  PsoConfig pso_cfg;
  ActivationOpts pso_act;
  pso->add_option("--data", pso_data, "time-series CSV")->required();
  pso->add_option("--population", pso_cfg.population_size)->capture_default_str();
  pso->add_option("--max-iters", pso_cfg.max_iters)->capture_default_str();
  pso->add_option("--seed", pso_cfg.seed)->capture_default_str();
  pso->add_option("--out", pso_out, "weights file (.json or .csv)")->required();
  pso_act.add(pso);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score a learned map against data and, optionally, a target map");
  std::string ev_data, ev_learned, ev_target;
  std::optional<double> ev_target_lambda;
  std::size_t ev_m = 0, ev_k = 0;
  std::uint64_t ev_seed = 0;
  ActivationOpts ev_act;
  ev->add_option("--data", ev_data, "time-series CSV")->required();
  ev->add_option("--learned", ev_learned, "learned weights")->required();
  ev->add_option("--target", ev_target, "known target weights");
  ev->add_option("--target-lambda", ev_target_lambda, "target lambda (default: --lambda)");
  ev->add_option("--eval-m", ev_m, "fresh initial vectors for out-of-sample error (default: data m)");
  ev->add_option("--eval-k", ev_k, "steps for out-of-sample error (default: data k)");
  ev->add_option("--seed", ev_seed, "seed of the fresh initial vectors")->capture_default_str();
  ev_act.add(ev);

  // search
  auto* srch = app.add_subcommand("search", "random search over (alpha, beta, lambda)");
  std::string srch_data, srch_out, srch_family = "sigmoid";
  SearchSpace space;
  std::vector<double> a_range{0.0, 0.3}, b_range{0.0, 0.5}, l_range{0.0, 5.5};
  srch->add_option("--data", srch_data, "time-series CSV")->required();
  srch->add_option("--activation", srch_family)->capture_default_str();
  srch->add_option("--budget", space.budget)->capture_default_str();
  srch->add_option("--alpha-range", a_range)->expected(2);
  srch->add_option("--beta-range", b_range)->expected(2);
  srch->add_option("--lambda-range", l_range)->expected(2);
  srch->add_option("--seed", space.seed)->capture_default_str();
  srch->add_option("--out", srch_out, "weights learned with the best triple");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a full experiment from a JSON config");
  std::string exp_config, exp_out;
  std::uint64_t exp_seed = 0;
  exp->add_option("--config", exp_config, "experiment config JSON")->required();
  exp->add_option("--out", exp_out, "output directory")->required();
  exp->add_option("--seed", exp_seed, "master seed (overrides the config)")->required();

  // convert
  auto* conv = app.add_subcommand("convert", "convert weights between .json and .csv, or merge time-series CSVs");
  std::string conv_in, conv_out;
  conv->add_option("--in", conv_in, "weights file, time-series CSV, or directory of time-series CSVs")->required();
  conv->add_option("--out", conv_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      RandomFcmSpec spec;
      std::size_t m = gen_m, k = gen_k;
      double lambda = gen_act.lambda;
      const Family family = family_from_string(gen_act.family);
      spec.n = gen_n;
      spec.density = gen_density;
      if (!gen_preset.empty()) {
        const auto& p = map_preset(gen_preset);
        spec.n = p.n;
        spec.density = p.density;
        lambda = p.lambda(family);
        m = p.m;
        k = p.k;
      }
      spec.activation = ActivationSpec(family, lambda);
      spec.seed = derive_seed(gen_seed, 1);
      const WeightMatrix w = generate_fcm(spec);
      const ResponseSet clean =
          generate_responses(w, spec.activation, generate_initials(m, spec.n, family, derive_seed(gen_seed, 2)), k);
      const ResponseSet noisy = add_noise(clean, NoiseSpec{gen_mu, gen_sigma, derive_seed(gen_seed, 3)});
      const std::filesystem::path out(gen_out);
      save_weights(out / "generator.json", w);
      save_timeseries(out / "clean.csv", clean);
      save_timeseries(out / "data.csv", noisy);
      print({{"n", spec.n}, {"m", m}, {"k", k}, {"lambda", lambda}, {"activation", to_string(family)}});
    } else if (*lrn) {
      lrn_cfg.alpha = lrn_alpha;
      lrn_cfg.beta = lrn_beta;
      lrn_cfg.activation = lrn_act.spec();
      const ResponseSet rs = load_timeseries_csv(lrn_data);
      save_weights(lrn_out, learn(rs, lrn_cfg, lrn_threads));
    } else if (*pso) {
      const ResponseSet rs = load_timeseries_csv(pso_data);
      const PsoResult res = pso_learn_detailed(rs, pso_act.spec(), pso_cfg);
      save_weights(pso_out, res.weights);
      print({{"fitness", res.fitness}, {"iterations", res.iterations}});
    } else if (*ev) {
      const ResponseSet rs = load_timeseries_csv(ev_data);
      const WeightMatrix learned = load_weights(ev_learned);
      const ActivationSpec act = ev_act.spec();
      MetricsReport rep;
      rep.data_error = data_error(rs, learned, act);
      if (!ev_target.empty()) {
        const WeightMatrix target = load_weights(ev_target);
        const ActivationSpec tact(act.family(), ev_target_lambda.value_or(act.lambda()));
        const auto fresh = generate_initials(ev_m ? ev_m : rs.m(), rs.n(), act.family(), ev_seed);
        rep.out_of_sample_error = out_of_sample_error(target, tact, learned, act, fresh, ev_k ? ev_k : rs.k());
        rep.model_error = model_error(target, learned);
        rep.ss_mean = ss_mean(target, learned);
      }
      json j = report_to_json(rep);
      j.erase("executionSeconds");
      print(j);
    } else if (*srch) {
      space.alpha = {a_range[0], a_range[1]};
      space.beta = {b_range[0], b_range[1]};
      space.lambda = {l_range[0], l_range[1]};
      LearnConfig base;
      base.activation = ActivationSpec(family_from_string(srch_family), 1.0);
      const ResponseSet rs = load_timeseries_csv(srch_data);
      const SearchResult res = random_search(rs, space, base);
      if (!srch_out.empty()) save_weights(srch_out, res.weights);
      print({{"alpha", res.best.alpha},
             {"beta", res.best.beta},
             {"lambda", res.best.lambda},
             {"dataError", res.best.data_error}});
    } else if (*exp) {
      json j;
      try {
        j = json::parse(read_file(exp_config));
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
      }
      j["seed"] = exp_seed;
      const ExperimentConfig cfg = experiment_config_from_json(j);
      const ExperimentResult res = run_experiment(cfg);
      write_experiment(exp_out, cfg, res);
      json summary = json::object();
      for (const auto& [method, agg] : res.summary) summary[method] = aggregate_to_json(agg);
      print(summary);
    } else if (*conv) {
      const std::filesystem::path in(conv_in), out(conv_out);
      if (std::filesystem::is_directory(in)) {
        // merge per-sequence files in lexical order of their names
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(in)) {
          if (e.path().extension() == ".csv") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw DataError("no .csv files in '" + in.string() + "'");
        ResponseSet merged;
        for (const auto& f : files) {
          const ResponseSet part = load_timeseries_csv(f);
          merged.initials.insert(merged.initials.end(), part.initials.begin(), part.initials.end());
          merged.sequences.insert(merged.sequences.end(), part.sequences.begin(), part.sequences.end());
        }
        merged.validate(1);
        save_timeseries(out, merged);
      } else if (in.extension() == ".json" || read_file(in).rfind("seq,", 0) != 0) {
        save_weights(out, load_weights(in));
      } else {
        save_timeseries(out, load_timeseries_csv(in));
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
