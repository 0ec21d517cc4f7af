#include "gradecast/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "gradecast/dataset.hpp"
#include "gradecast/error.hpp"
#include "gradecast/format.hpp"
#include "gradecast/linear.hpp"
#include "gradecast/metrics.hpp"
#include "gradecast/model.hpp"
#include "gradecast/model_tree.hpp"
#include "gradecast/paper_models.hpp"
#include "gradecast/schema.hpp"
#include "gradecast/service.hpp"

// after Eigen: <resolv.h> defines a _res macro that clashes with Eigen internals
#include <CLI11.hpp>
#include <httplib.h>

namespace gradecast {

namespace {

struct Options {
  // shared
  std::string schema_path;
  bool pretty = false;
  std::string out_path;
  // data
  std::string csv_path;
  std::string granularity;
  std::string normalization = "none";
  bool no_scale_check = false;
  std::vector<std::string> features;
  // training
  std::string algo = "ols";
  int min_split = TreeParams{}.min_split;
  double sd_fraction = TreeParams{}.sd_threshold_fraction;
  double smoothing_k = TreeParams{}.smoothing_k;
  bool no_prune = false;
  bool no_smooth = false;
  std::uint64_t seed = 1;
  std::optional<double> train_fraction;
  std::string test_out;
  // evaluation / prediction
  std::string model;
  bool no_timing = false;
  std::string responses_path;
  std::string responses_json;
  int leaf = 0;
  // service
  int port = 8080;
  std::string host = "127.0.0.1";
  std::vector<std::string> custom_models;
  std::string ui_dir;
  std::string cors_origin = "*";
  // synthetic data
  std::size_t rows = 200;
};

QuestionnaireSchema schema_for(const Options& o) {
  return o.schema_path.empty() ? active_schema() : load_schema_file(o.schema_path);
}

void emit(const Options& o, std::ostream& out, const std::string& payload) {
  if (o.out_path.empty()) {
    out << payload << '\n';
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write " + o.out_path);
  file << payload << '\n';
}

Dataset load_dataset(const Options& o, const QuestionnaireSchema& schema) {
  CsvOptions csv;
  csv.check_scale = !o.no_scale_check;
  Dataset d = load_csv_file(o.csv_path, schema, csv);
  if (!o.granularity.empty()) {
    const auto wanted = parse_granularity(o.granularity);
    if (wanted == Granularity::Factor && d.granularity() == Granularity::Variable) {
      d = aggregate_factors(d, schema);
    } else if (wanted != d.granularity()) {
      throw Error(ErrorKind::WrongGranularity, "cannot turn a factor-level CSV into variable-level data");
    }
  }
  if (!o.features.empty()) d = d.select_features(o.features);
  if (o.normalization == "minmax") {
    d = normalize(d, Normalization::MinMax);
  } else if (o.normalization != "none") {
    throw Error(ErrorKind::InvalidArgument, "normalization must be 'none' or 'minmax'");
  }
  return d;
}

// Matches a dataset to what a model reads: factor models accept variable
// CSVs by summing answers.
Dataset align_dataset(const Model& model, Dataset d, const QuestionnaireSchema& schema) {
  if (model.granularity() == Granularity::Factor && d.granularity() == Granularity::Variable) {
    return aggregate_factors(d, schema);
  }
  if (model.granularity() == Granularity::Variable && d.granularity() == Granularity::Factor) {
    throw Error(ErrorKind::WrongGranularity, "variable-level model cannot read a factor-level CSV");
  }
  return d;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const auto schema = schema_for(o);
  Dataset d = load_dataset(o, schema);
  if (o.train_fraction) {
    auto [train, test] = split_train_test(d, SplitSpec{*o.train_fraction, o.seed});
    if (!o.test_out.empty()) {
      std::ofstream file(o.test_out, std::ios::binary);
      if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write " + o.test_out);
      write_csv(file, test);
    }
    d = std::move(train);
  }

  const auto start = std::chrono::steady_clock::now();
  nlohmann::ordered_json doc;
  if (o.algo == "ols") {
    auto [model, diag] = fit_ols(d, d.feature_names());
    if (diag.rank_deficient) {
      err << "warning: normal matrix is rank deficient; ridge " << format_number(diag.ridge_used) << " applied\n";
    }
    doc = model.to_json();
  } else if (o.algo == "m5p") {
    TreeParams params;
    params.min_split = o.min_split;
    params.sd_threshold_fraction = o.sd_fraction;
    params.smoothing_k = o.smoothing_k;
    params.prune = !o.no_prune;
    params.smooth = !o.no_smooth;
    doc = build_tree(d, params).to_json();
  } else if (o.algo == "lrc") {
    doc = LrcModel::fit(d).to_json();
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown algorithm: " + o.algo);
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  err << "build time: " << format_number(round_to(elapsed.count(), 3)) << " s (" << d.size() << " samples, "
      << d.feature_count() << " features)\n";
  emit(o, out, dump_json(doc, o.pretty));
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream&) {
  const auto schema = schema_for(o);
  const auto entry = resolve_model(o.model);
  const Dataset d = align_dataset(entry.model, load_dataset(o, schema), schema);
  EvaluateOptions eval;
  eval.record_timing = !o.no_timing;
  const auto report = evaluate([&](const FeatureMap& x) { return entry.model.predict(x); }, d, eval);
  emit(o, out, dump_json(report.to_json(), o.pretty));
  return kExitOk;
}

FeatureMap read_responses(const Options& o) {
  std::string text = o.responses_json;
  if (!o.responses_path.empty()) {
    if (o.responses_path == "-") {
      std::ostringstream buf;
      buf << std::cin.rdbuf();
      text = buf.str();
    } else {
      std::ifstream in(o.responses_path);
      if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open responses file: " + o.responses_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
  }
  if (text.empty()) throw Error(ErrorKind::InvalidArgument, "predict needs --responses or --responses-json");
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("responses are not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("responses")) doc = doc["responses"];
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "responses must be a JSON object");
  FeatureMap values;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number()) throw Error(ErrorKind::ParseError, "response " + key + " is not a number");
    values.emplace(key, value.get<double>());
  }
  return values;
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream&) {
  const auto schema = schema_for(o);
  const auto entry = resolve_model(o.model);
  const auto outcome = predict_with(entry, read_responses(o), schema);
  emit(o, out, dump_json(outcome.to_json(false), o.pretty));
  return kExitOk;
}

int cmd_schema(const Options& o, std::ostream& out, std::ostream&) {
  emit(o, out, dump_json(schema_for(o).to_json(), o.pretty));
  return kExitOk;
}

std::string describe_feature(const QuestionnaireSchema& schema, const std::string& name) {
  if (auto id = VariableId::parse(name)) return schema.prompt(*id);
  if (auto code = parse_factor(name)) return std::string(factor_info(*code).title);
  return {};
}

int cmd_significance(const Options& o, std::ostream& out, std::ostream&) {
  const auto schema = schema_for(o);
  const auto entry = resolve_model(o.model);
  LinearModel linear;
  if (const auto* m = std::get_if<LinearModel>(&entry.model.value())) {
    linear = *m;
  } else if (const auto* t = std::get_if<ModelTree>(&entry.model.value())) {
    const auto leaves = t->leaf_models();
    if (o.leaf < 1 || static_cast<std::size_t>(o.leaf) > leaves.size()) {
      throw Error(ErrorKind::InvalidArgument, "tree model has " + std::to_string(leaves.size()) +
                                                  " leaves; choose one with --leaf 1.." + std::to_string(leaves.size()));
    }
    linear = *leaves[static_cast<std::size_t>(o.leaf - 1)];
  } else {
    throw Error(ErrorKind::InvalidArgument, "significance needs a linear model or a tree leaf");
  }

  std::vector<std::string> universe;
  switch (infer_granularity(linear.feature_order()).value_or(Granularity::Variable)) {
    case Granularity::Variable:
      universe = variable_names();
      break;
    case Granularity::Factor:
      universe = factor_names();
      break;
  }
  if (!linear.terms().empty() && !infer_granularity(linear.feature_order())) universe = linear.feature_order();
  const auto report = classify_significance(linear, universe);

  const auto section = [&](const std::vector<std::string>& names, bool with_coefficient) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& n : names) {
      nlohmann::ordered_json item;
      item["id"] = n;
      item["prompt"] = describe_feature(schema, n);
      if (with_coefficient) item["coefficient"] = linear.coefficient(n).value_or(0.0);
      arr.push_back(std::move(item));
    }
    return arr;
  };

  if (o.pretty) {
    std::ostringstream text;
    text << "model: " << entry.id << '\n';
    text << "positive: " << report.positive.size() << "  negative: " << report.negative.size()
         << "  insignificant: " << report.insignificant.size() << '\n';
    const auto print = [&](std::string_view title, const std::vector<std::string>& names) {
      text << '\n' << title << " (" << names.size() << ")\n";
      for (const auto& n : names) {
        text << "  " << n;
        if (auto c = linear.coefficient(n); c && *c != 0.0) text << "  " << format_number(*c);
        text << "  " << describe_feature(schema, n) << '\n';
      }
    };
    print("Positive", report.positive);
    print("Negative", report.negative);
    print("Insignificant", report.insignificant);
    auto s = text.str();
    s.pop_back();
    emit(o, out, s);
    return kExitOk;
  }

  nlohmann::ordered_json doc;
  doc["model"] = entry.id;
  doc["counts"] = {{"positive", report.positive.size()},
                   {"negative", report.negative.size()},
                   {"insignificant", report.insignificant.size()}};
  doc["positive"] = section(report.positive, true);
  doc["negative"] = section(report.negative, true);
  doc["insignificant"] = section(report.insignificant, false);
  emit(o, out, dump_json(doc, false));
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream&, std::ostream& err) {
  auto registry = ModelRegistry::published();
  for (const auto& path : o.custom_models) {
    const auto& entry = registry.add_custom(path);
    err << "registered " << entry.id << '\n';
  }
  ServiceConfig config;
  config.cors_origin = o.cors_origin;
  if (!o.ui_dir.empty()) config.static_dir = o.ui_dir;
  const Service service(schema_for(o), std::move(registry), GradeBounds{}, config);

  httplib::Server server;
  service.mount(server);
  err << "gradecast " << build_version() << " listening on http://" << o.host << ':' << o.port << '\n';
  if (!server.listen(o.host, o.port)) {
    throw Error(ErrorKind::InvalidArgument, "cannot listen on " + o.host + ":" + std::to_string(o.port));
  }
  return kExitOk;
}

// Synthetic questionnaire data: uniform answers on the schema scale, grades
// from a damped copy of the published variable-level model plus noise.
int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
  const auto schema = schema_for(o);
  if (o.rows == 0) throw Error(ErrorKind::InvalidArgument, "--rows must be positive");
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> answer(schema.scale().min, schema.scale().max);
  std::normal_distribution<double> noise(0.0, 0.3);
  const auto& model = builtin_model(PaperModelId::LrcVariable);
  const double centre = model.intercept() + 0.5 * (schema.scale().min + schema.scale().max) *
                                                 [&] {
                                                   double s = 0.0;
                                                   for (const auto& t : model.terms()) s += t.second;
                                                   return s;
                                                 }();
  const GradeBounds bounds;
  std::vector<Sample> samples;
  samples.reserve(o.rows);
  for (std::size_t r = 0; r < o.rows; ++r) {
    Sample s;
    FeatureMap x;
    for (int i = 1; i <= kVariableCount; ++i) {
      const double v = answer(rng);
      s.features.push_back(v);
      x.emplace("x" + std::to_string(i), v);
    }
    const double raw = 4.5 + 0.3 * (predict_linear(model, x) - centre) + noise(rng);
    s.target = round_to(bounds.clamp(raw), 2);
    samples.push_back(std::move(s));
  }
  Dataset d(variable_names(), std::move(samples), Granularity::Variable);
  if (!o.granularity.empty() && parse_granularity(o.granularity) == Granularity::Factor) {
    d = aggregate_factors(d, schema);
  }
  std::ostringstream csv;
  write_csv(csv, d);
  auto text = csv.str();
  text.pop_back();
  emit(o, out, text);
  err << "wrote " << d.size() << " synthetic rows\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Student performance prediction: questionnaire models, M5P trees and evaluation", "gradecast"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(build_version()));

  const auto add_schema = [&](CLI::App* c) {
    c->add_option("--schema", o.schema_path, "Questionnaire schema JSON (default: $GRADECAST_SCHEMA or builtin)");
  };
  const auto add_output = [&](CLI::App* c) {
    c->add_option("--out", o.out_path, "Write the payload to a file instead of stdout");
    c->add_flag("--pretty", o.pretty, "Human-readable output");
  };
  const auto add_data = [&](CLI::App* c) {
    c->add_option("--csv", o.csv_path, "Input CSV (x1..x70 or factor columns, plus grade)")->required();
    c->add_option("--granularity", o.granularity, "variable | factor (variable CSVs can be aggregated)")
        ->check(CLI::IsMember({"variable", "factor"}));
    c->add_option("--features", o.features, "Restrict to these feature columns")->delimiter(',');
    c->add_option("--normalize", o.normalization, "none | minmax")->check(CLI::IsMember({"none", "minmax"}));
    c->add_flag("--no-scale-check", o.no_scale_check, "Accept values outside the response scale and grade bounds");
  };

  auto* train = app.add_subcommand("train", "Fit a model on a CSV and write it as JSON");
  add_schema(train);
  add_output(train);
  add_data(train);
  train->add_option("--algo", o.algo, "ols | m5p | lrc")->check(CLI::IsMember({"ols", "m5p", "lrc"}));
  train->add_option("--min-split", o.min_split, "M5P: minimum samples per child");
  train->add_option("--sd-fraction", o.sd_fraction, "M5P: stop when node sd falls below this fraction of root sd");
  train->add_option("--smoothing-k", o.smoothing_k, "M5P: smoothing constant");
  train->add_flag("--no-prune", o.no_prune, "M5P: keep the fully grown tree");
  train->add_flag("--no-smooth", o.no_smooth, "M5P: predict with raw leaf models");
  train->add_option("--seed", o.seed, "Seed for the train/test split");
  train->add_option("--train-fraction", o.train_fraction, "Train on this fraction, hold out the rest");
  train->add_option("--test-out", o.test_out, "Write the held-out rows to this CSV");

  auto* eval = app.add_subcommand("evaluate", "Score a model on a CSV");
  add_schema(eval);
  add_output(eval);
  add_data(eval);
  eval->add_option("--model", o.model, "Published model id or model JSON file")->required();
  eval->add_flag("--no-timing", o.no_timing, "Report zero timings (reproducible output)");

  auto* predict = app.add_subcommand("predict", "Predict a grade from questionnaire responses");
  add_schema(predict);
  add_output(predict);
  predict->add_option("--model", o.model, "Published model id or model JSON file")->required();
  predict->add_option("--responses", o.responses_path, "Responses JSON file ('-' for stdin)");
  predict->add_option("--responses-json", o.responses_json, "Responses JSON text");

  auto* schema = app.add_subcommand("schema", "Print the questionnaire schema");
  add_schema(schema);
  add_output(schema);

  auto* significance = app.add_subcommand("significance", "Positive, negative and insignificant features of a model");
  add_schema(significance);
  add_output(significance);
  significance->add_option("--model", o.model, "Published model id or model JSON file")->required();
  significance->add_option("--leaf", o.leaf, "Leaf index (1-based, left to right) for tree models");

  auto* serve = app.add_subcommand("serve", "Run the prediction HTTP service");
  add_schema(serve);
  serve->add_option("--port", o.port, "Listen port");
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--model", o.custom_models, "Register a model file as custom:<stem> (repeatable)");
  serve->add_option("--ui-dir", o.ui_dir, "Serve a static UI bundle from this directory");
  serve->add_option("--cors-origin", o.cors_origin, "Access-Control-Allow-Origin value");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic questionnaire CSV");
  add_schema(synth);
  add_output(synth);
  synth->add_option("--rows", o.rows, "Number of rows");
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--granularity", o.granularity, "variable | factor")
      ->check(CLI::IsMember({"variable", "factor"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (train->parsed()) return cmd_train(o, out, err);
    if (eval->parsed()) return cmd_evaluate(o, out, err);
    if (predict->parsed()) return cmd_predict(o, out, err);
    if (schema->parsed()) return cmd_schema(o, out, err);
    if (significance->parsed()) return cmd_significance(o, out, err);
    if (serve->parsed()) return cmd_serve(o, out, err);
    if (synth->parsed()) return cmd_synth(o, out, err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return is_input_error(e.kind()) ? kExitInputError : kExitComputeError;
  } catch (const nlohmann::json::exception& e) {
    err << "error [ParseError]: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputeError;
  }
  return kExitInputError;
}

}  // namespace gradecast
