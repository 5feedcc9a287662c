#include "fcm/harness.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "fcm/rng.hpp"

namespace fcm {

void SearchSpace::validate() const {
  for (const auto& [name, r] : {std::pair{"alpha", alpha}, std::pair{"beta", beta}, std::pair{"lambda", lambda}}) {
    if (!(r.hi > r.lo) || !(r.hi > 0.0) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      throw ConfigError(std::string(name) + " search range must be nonempty with a positive upper bound");
    }
  }
  if (!(lambda.hi > 0.0)) throw ConfigError("lambda range must allow positive values");
  if (budget < 1) throw ConfigError("search budget must be >= 1");
}

SearchResult random_search(const ResponseSet& rs, const SearchSpace& space, const LearnConfig& base) {
  space.validate();
  rs.validate(2);
  Rng rng(space.seed);
  SearchResult result;
  bool have_best = false;
  for (int c = 0; c < space.budget; ++c) {
    Candidate cand;
    cand.alpha = rng.uniform_open(space.alpha.lo, space.alpha.hi);
    cand.beta = rng.uniform_open(space.beta.lo, space.beta.hi);
    // lambda must stay positive even if the configured range starts below 0
    do {
      cand.lambda = rng.uniform_open(space.lambda.lo, space.lambda.hi);
    } while (!(cand.lambda > 0.0));

    LearnConfig cfg = base;
    cfg.alpha = cand.alpha;
    cfg.beta = cand.beta;
    cfg.activation = ActivationSpec(base.activation.family(), cand.lambda);
    WeightMatrix w = learn(rs, cfg);
    cand.data_error = data_error(rs, w, cfg.activation);
    result.candidates.push_back(cand);
    if (!have_best || cand.data_error < result.best.data_error) {
      result.best = cand;
      result.weights = std::move(w);
      have_best = true;
    }
  }
  return result;
}

Learner lefcm_learner(const LearnConfig& cfg) {
  return Learner{"lefcm", cfg.activation, [cfg](const ResponseSet& rs) { return learn(rs, cfg); }};
}

Learner pso_learner(const ActivationSpec& activation, const PsoConfig& cfg) {
  return Learner{"pso", activation, [activation, cfg](const ResponseSet& rs) { return pso_learn(rs, activation, cfg); }};
}

LooResult leave_one_out(const ResponseSet& rs, const Learner& learner, const std::optional<TargetInfo>& target) {
  rs.validate(2);
  if (rs.m() < 2) throw DataError("leave-one-out needs at least 2 response sequences");
  LooResult out;
  for (std::size_t s = 0; s < rs.m(); ++s) {
    const ResponseSet train = rs.without(s);
    const auto start = std::chrono::steady_clock::now();
    const WeightMatrix w = learner.fit(train);
    const auto stop = std::chrono::steady_clock::now();

    MetricsReport rep;
    rep.execution_seconds = std::chrono::duration<double>(stop - start).count();
    rep.data_error = data_error(rs.only(s), w, learner.activation);
    if (target) {
      const std::size_t em = target->eval_m ? target->eval_m : rs.m();
      const std::size_t ek = target->eval_k ? target->eval_k : rs.k();
      const auto fresh = generate_initials(em, rs.n(), target->activation.family(), derive_seed(target->seed, s));
      rep.out_of_sample_error =
          out_of_sample_error(target->weights, target->activation, w, learner.activation, fresh, ek);
      rep.model_error = model_error(target->weights, w);
      rep.ss_mean = ss_mean(target->weights, w);
    }
    out.folds.push_back(rep);
  }
  out.summary = aggregate(out.folds);
  return out;
}

LooResult leave_one_out(const ResponseSet& rs, const LearnConfig& cfg, const std::optional<TargetInfo>& target) {
  return leave_one_out(rs, lefcm_learner(cfg), target);
}

Histogram weight_histogram(const WeightMatrix& w, int bins) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  Histogram h;
  const double width = 2.0 / bins;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(-1.0 + width * b);
  h.edges.back() = 1.0;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const Matrix& m = w.matrix();
  for (Eigen::Index idx = 0; idx < m.size(); ++idx) {
    auto b = static_cast<int>(std::floor((m(idx) + 1.0) / width));
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

std::string histogram_to_csv(const Histogram& h) {
  std::string out = "binLow,binHigh,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out += format_double(h.edges[b]) + ',' + format_double(h.edges[b + 1]) + ',' + std::to_string(h.counts[b]) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {

template <typename T>
T get_field(const json& obj, const char* key, const std::string& context) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(context + "." + key + ": " + e.what());
  }
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown field '" + key + "' in " + context);
  }
}

Interval interval_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(context + " must be a [low, high] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json interval_to_json(const Interval& r) { return json::array({r.lo, r.hi}); }

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!data_path) {
    map_spec.validate();
    if (m < 1) throw ConfigError("m must be >= 1");
    if (k < 2) throw ConfigError("k must be >= 2");
  }
  noise.validate();
  if (!hyperparameters) search.validate();
  learner.validate();
  if (methods.empty()) throw ConfigError("at least one method is required");
  for (const auto& name : methods) {
    if (name != "lefcm" && name != "pso") throw ConfigError("unknown method '" + name + "' (expected lefcm or pso)");
  }
  if (std::find(methods.begin(), methods.end(), "pso") != methods.end()) pso.validate();
}

ExperimentConfig experiment_config_from_json(const json& j) {
  check_keys(j,
             {"preset", "mapSpec", "m", "k", "dataPath", "targetPath", "targetLambda", "activation", "noise", "search",
              "trials", "evalM", "evalK", "seed", "methods", "pso", "learner", "hyperparameters"},
             "config");
  ExperimentConfig cfg;
  const std::string ctx = "config";
  if (j.contains("activation")) cfg.activation = family_from_string(get_field<std::string>(j, "activation", ctx));

  double lambda = 1.0;
  if (j.contains("preset")) {
    const auto& p = map_preset(get_field<std::string>(j, "preset", ctx));
    cfg.preset = p.name;
    cfg.map_spec.n = p.n;
    cfg.map_spec.density = p.density;
    lambda = p.lambda(cfg.activation);
    cfg.m = p.m;
    cfg.k = p.k;
  }
  if (j.contains("mapSpec")) {
    const json& ms = j["mapSpec"];
    check_keys(ms, {"n", "density", "lambda", "pruneThreshold"}, "mapSpec");
    if (ms.contains("n")) cfg.map_spec.n = get_field<std::size_t>(ms, "n", "mapSpec");
    if (ms.contains("density")) cfg.map_spec.density = get_field<double>(ms, "density", "mapSpec");
    if (ms.contains("lambda")) lambda = get_field<double>(ms, "lambda", "mapSpec");
    if (ms.contains("pruneThreshold")) cfg.map_spec.prune_threshold = get_field<double>(ms, "pruneThreshold", "mapSpec");
  }
  cfg.map_spec.activation = ActivationSpec(cfg.activation, lambda);
  if (j.contains("m")) cfg.m = get_field<std::size_t>(j, "m", ctx);
  if (j.contains("k")) cfg.k = get_field<std::size_t>(j, "k", ctx);
  if (j.contains("dataPath")) cfg.data_path = get_field<std::string>(j, "dataPath", ctx);
  if (j.contains("targetPath")) cfg.target_path = get_field<std::string>(j, "targetPath", ctx);
  if (j.contains("targetLambda")) cfg.target_lambda = get_field<double>(j, "targetLambda", ctx);

  if (j.contains("noise")) {
    const json& nz = j["noise"];
    check_keys(nz, {"mu", "sigma"}, "noise");
    if (nz.contains("mu")) cfg.noise.mu = get_field<double>(nz, "mu", "noise");
    if (nz.contains("sigma")) cfg.noise.sigma = get_field<double>(nz, "sigma", "noise");
  }
  if (j.contains("search")) {
    const json& s = j["search"];
    check_keys(s, {"alphaRange", "betaRange", "lambdaRange", "budget"}, "search");
    if (s.contains("alphaRange")) cfg.search.alpha = interval_from_json(s["alphaRange"], "search.alphaRange");
    if (s.contains("betaRange")) cfg.search.beta = interval_from_json(s["betaRange"], "search.betaRange");
    if (s.contains("lambdaRange")) cfg.search.lambda = interval_from_json(s["lambdaRange"], "search.lambdaRange");
    if (s.contains("budget")) cfg.search.budget = get_field<int>(s, "budget", "search");
  }
  if (j.contains("trials")) cfg.trials = get_field<int>(j, "trials", ctx);
  if (j.contains("evalM")) cfg.eval_m = get_field<std::size_t>(j, "evalM", ctx);
  if (j.contains("evalK")) cfg.eval_k = get_field<std::size_t>(j, "evalK", ctx);
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed", ctx);
  if (j.contains("methods")) cfg.methods = get_field<std::vector<std::string>>(j, "methods", ctx);

  if (j.contains("pso")) {
    const json& p = j["pso"];
    check_keys(p,
               {"populationSize", "maxIters", "accel1", "accel2", "inertiaStart", "inertiaEnd", "minErrorGrad",
                "stallWindow", "velocityMax"},
               "pso");
    if (p.contains("populationSize")) cfg.pso.population_size = get_field<std::size_t>(p, "populationSize", "pso");
    if (p.contains("maxIters")) cfg.pso.max_iters = get_field<int>(p, "maxIters", "pso");
    if (p.contains("accel1")) cfg.pso.accel1 = get_field<double>(p, "accel1", "pso");
    if (p.contains("accel2")) cfg.pso.accel2 = get_field<double>(p, "accel2", "pso");
    if (p.contains("inertiaStart")) cfg.pso.inertia_start = get_field<double>(p, "inertiaStart", "pso");
    if (p.contains("inertiaEnd")) cfg.pso.inertia_end = get_field<double>(p, "inertiaEnd", "pso");
    if (p.contains("minErrorGrad")) cfg.pso.min_error_grad = get_field<double>(p, "minErrorGrad", "pso");
    if (p.contains("stallWindow")) cfg.pso.stall_window = get_field<int>(p, "stallWindow", "pso");
    if (p.contains("velocityMax")) cfg.pso.velocity_max = get_field<double>(p, "velocityMax", "pso");
  }
  if (j.contains("learner")) {
    const json& l = j["learner"];
    check_keys(l, {"clampEps", "entropyFloor", "smoothMu", "maxIters", "gradTol", "objTol"}, "learner");
    if (l.contains("clampEps")) cfg.learner.clamp_eps = get_field<double>(l, "clampEps", "learner");
    if (l.contains("entropyFloor")) cfg.learner.entropy_floor = get_field<double>(l, "entropyFloor", "learner");
    if (l.contains("smoothMu")) cfg.learner.smooth_mu = get_field<double>(l, "smoothMu", "learner");
    if (l.contains("maxIters")) cfg.learner.max_iters = get_field<int>(l, "maxIters", "learner");
    if (l.contains("gradTol")) cfg.learner.grad_tol = get_field<double>(l, "gradTol", "learner");
    if (l.contains("objTol")) cfg.learner.obj_tol = get_field<double>(l, "objTol", "learner");
  }
  if (j.contains("hyperparameters") && !j["hyperparameters"].is_null()) {
    const json& h = j["hyperparameters"];
    check_keys(h, {"alpha", "beta", "lambda"}, "hyperparameters");
    Candidate c;
    c.alpha = get_field<double>(h, "alpha", "hyperparameters");
    c.beta = get_field<double>(h, "beta", "hyperparameters");
    c.lambda = get_field<double>(h, "lambda", "hyperparameters");
    ActivationSpec(cfg.activation, c.lambda);  // validates lambda
    cfg.hyperparameters = c;
  }
  cfg.validate();
  return cfg;
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.preset) j["preset"] = *cfg.preset;
  j["mapSpec"] = {{"n", cfg.map_spec.n},
                  {"density", cfg.map_spec.density},
                  {"lambda", cfg.map_spec.activation.lambda()},
                  {"pruneThreshold", cfg.map_spec.prune_threshold}};
  j["m"] = cfg.m;
  j["k"] = cfg.k;
  if (cfg.data_path) j["dataPath"] = *cfg.data_path;
  if (cfg.target_path) j["targetPath"] = *cfg.target_path;
  if (cfg.target_lambda) j["targetLambda"] = *cfg.target_lambda;
  j["activation"] = to_string(cfg.activation);
  j["noise"] = {{"mu", cfg.noise.mu}, {"sigma", cfg.noise.sigma}};
  j["search"] = {{"alphaRange", interval_to_json(cfg.search.alpha)},
                 {"betaRange", interval_to_json(cfg.search.beta)},
                 {"lambdaRange", interval_to_json(cfg.search.lambda)},
                 {"budget", cfg.search.budget}};
  j["trials"] = cfg.trials;
  j["evalM"] = cfg.eval_m;
  j["evalK"] = cfg.eval_k;
  j["seed"] = cfg.seed;
  j["methods"] = cfg.methods;
  j["pso"] = {{"populationSize", cfg.pso.population_size}, {"maxIters", cfg.pso.max_iters},
              {"accel1", cfg.pso.accel1},                  {"accel2", cfg.pso.accel2},
              {"inertiaStart", cfg.pso.inertia_start},     {"inertiaEnd", cfg.pso.inertia_end},
              {"minErrorGrad", cfg.pso.min_error_grad},    {"stallWindow", cfg.pso.stall_window},
              {"velocityMax", cfg.pso.velocity_max}};
  j["learner"] = {{"clampEps", cfg.learner.clamp_eps}, {"entropyFloor", cfg.learner.entropy_floor},
                  {"smoothMu", cfg.learner.smooth_mu}, {"maxIters", cfg.learner.max_iters},
                  {"gradTol", cfg.learner.grad_tol},   {"objTol", cfg.learner.obj_tol}};
  if (cfg.hyperparameters) {
    j["hyperparameters"] = {{"alpha", cfg.hyperparameters->alpha},
                            {"beta", cfg.hyperparameters->beta},
                            {"lambda", cfg.hyperparameters->lambda}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

// Stream ids for seed derivation within one trial.
enum Stream : std::uint64_t { kMap = 1, kInitials, kNoise, kSearch, kEval, kPso };

MetricsReport trial_means(const AggregateReport& a) {
  MetricsReport r;
  r.data_error = a.data_error.mean;
  if (a.out_of_sample_error) r.out_of_sample_error = a.out_of_sample_error->mean;
  if (a.model_error) r.model_error = a.model_error->mean;
  if (a.ss_mean) r.ss_mean = a.ss_mean->mean;
  r.execution_seconds = a.execution_seconds.mean;
  return r;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;

  std::optional<ResponseSet> external;
  std::optional<WeightMatrix> external_target;
  if (cfg.data_path) {
    external = load_timeseries_csv(*cfg.data_path);
    external->validate(2);
    if (cfg.target_path) {
      external_target = load_weights(*cfg.target_path);
      if (external_target->n() != external->n()) throw DataError("target map size does not match the data");
    }
  }

  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    TrialResult trial;
    ResponseSet clean;
    if (external) {
      clean = *external;
      trial.generator = external_target;
      trial.data_activation = ActivationSpec(cfg.activation, cfg.target_lambda.value_or(cfg.map_spec.activation.lambda()));
    } else {
      RandomFcmSpec spec = cfg.map_spec;
      spec.seed = derive_seed(trial_seed, kMap);
      trial.generator = generate_fcm(spec);
      trial.data_activation = spec.activation;
      const auto initials = generate_initials(cfg.m, spec.n, cfg.activation, derive_seed(trial_seed, kInitials));
      clean = generate_responses(*trial.generator, spec.activation, initials, cfg.k);
    }
    NoiseSpec noise = cfg.noise;
    noise.seed = derive_seed(trial_seed, kNoise);
    trial.data = add_noise(clean, noise);

    std::optional<TargetInfo> target;
    if (trial.generator) {
      target = TargetInfo{*trial.generator, trial.data_activation, cfg.eval_m, cfg.eval_k,
                          derive_seed(trial_seed, kEval)};
    }

    for (const auto& method : cfg.methods) {
      MethodTrial mt;
      mt.method = method;
      if (method == "lefcm") {
        LearnConfig lc = cfg.learner;
        lc.activation = ActivationSpec(cfg.activation, 1.0);
        if (cfg.hyperparameters) {
          Candidate c = *cfg.hyperparameters;
          lc.alpha = c.alpha;
          lc.beta = c.beta;
          lc.activation = ActivationSpec(cfg.activation, c.lambda);
          mt.learned = learn(trial.data, lc);
          c.data_error = data_error(trial.data, mt.learned, lc.activation);
          mt.hyperparameters = c;
        } else {
          SearchSpace space = cfg.search;
          space.seed = derive_seed(trial_seed, kSearch);
          SearchResult sr = random_search(trial.data, space, lc);
          lc.alpha = sr.best.alpha;
          lc.beta = sr.best.beta;
          lc.activation = ActivationSpec(cfg.activation, sr.best.lambda);
          mt.hyperparameters = sr.best;
          mt.learned = std::move(sr.weights);
        }
        mt.loo = leave_one_out(trial.data, lc, target);
      } else {
        PsoConfig pc = cfg.pso;
        pc.seed = derive_seed(trial_seed, kPso);
        const Learner pso = pso_learner(trial.data_activation, pc);
        mt.learned = pso.fit(trial.data);
        mt.loo = leave_one_out(trial.data, pso, target);
      }
      trial.methods.push_back(std::move(mt));
    }
    result.trials.push_back(std::move(trial));
  }

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    std::vector<MetricsReport> per_trial;
    for (const auto& tr : result.trials) per_trial.push_back(trial_means(tr.methods[mi].loo.summary));
    result.summary.emplace_back(cfg.methods[mi], aggregate(per_trial));
  }
  return result;
}

json metrics_json(const std::string& method, const ExperimentResult& result) {
  json trials = json::array();
  std::optional<AggregateReport> summary;
  for (const auto& [name, agg] : result.summary) {
    if (name == method) summary = agg;
  }
  if (!summary) throw ConfigError("no results for method '" + method + "'");
  for (std::size_t t = 0; t < result.trials.size(); ++t) {
    for (const auto& mt : result.trials[t].methods) {
      if (mt.method != method) continue;
      json folds = json::array();
      for (const auto& f : mt.loo.folds) folds.push_back(report_to_json(f));
      json hyper = nullptr;
      if (mt.hyperparameters) {
        hyper = {{"alpha", mt.hyperparameters->alpha},
                 {"beta", mt.hyperparameters->beta},
                 {"lambda", mt.hyperparameters->lambda},
                 {"dataError", mt.hyperparameters->data_error}};
      }
      trials.push_back({{"trial", t}, {"hyperparameters", hyper}, {"summary", aggregate_to_json(mt.loo.summary)},
                        {"folds", folds}});
    }
  }
  return json{{"method", method}, {"summary", aggregate_to_json(*summary)}, {"trials", trials}};
}

void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& cfg, const ExperimentResult& result) {
  std::filesystem::create_directories(dir);
  write_file(dir / "config.json", experiment_config_to_json(cfg).dump(2) + "\n");
  for (const auto& [method, agg] : result.summary) {
    write_file(dir / ("metrics_" + method + ".json"), metrics_json(method, result).dump(2) + "\n");
  }
  const bool single = result.trials.size() == 1;
  for (std::size_t t = 0; t < result.trials.size(); ++t) {
    const auto& trial = result.trials[t];
    const std::filesystem::path base = single ? dir : dir / ("trial_" + std::to_string(t));
    if (trial.generator) {
      save_weights(base / "generator.json", *trial.generator);
      write_file(base / ((cfg.data_path ? "hist_target" : "hist_generator") + std::string(".csv")),
                 histogram_to_csv(weight_histogram(*trial.generator)));
    }
    for (const auto& mt : trial.methods) {
      save_weights(base / ("learned_" + mt.method + ".json"), mt.learned);
      write_file(base / ("hist_" + mt.method + ".csv"), histogram_to_csv(weight_histogram(mt.learned)));
    }
    for (std::size_t s = 0; s < trial.data.m(); ++s) {
      save_timeseries(base / "timeseries" / (std::to_string(s) + ".csv"), trial.data.only(s));
    }
  }
}

}  // namespace fcm
