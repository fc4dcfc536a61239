#include "fgrt/model_io.hpp"

#include <fstream>

#include "fgrt/errors.hpp"
#include "json.hpp"

namespace fgrt {
namespace {

using json = nlohmann::ordered_json;

json conditions_to_json(const FgrtModel& model,
                        const std::vector<RuleCondition>& conditions) {
  json out = json::array();
  for (const RuleCondition& c : conditions) {
    const FeatureSpec& f = model.features[c.feature];
    out.push_back({{"feature", f.name},
                   {"term", f.partition.terms[c.term].label}});
  }
  return out;
}

std::vector<RuleCondition> conditions_from_json(const FgrtModel& model,
                                                const json& arr) {
  std::vector<RuleCondition> out;
  for (const json& item : arr) {
    const std::string feature = item.at("feature").get<std::string>();
    const std::string term = item.at("term").get<std::string>();
    int f_idx = -1;
    for (std::size_t f = 0; f < model.features.size(); ++f)
      if (model.features[f].name == feature) f_idx = static_cast<int>(f);
    if (f_idx < 0)
      throw DataError("model file references unknown feature '" + feature + "'");
    int t_idx = -1;
    const auto& terms = model.features[f_idx].partition.terms;
    for (std::size_t t = 0; t < terms.size(); ++t)
      if (terms[t].label == term) t_idx = static_cast<int>(t);
    if (t_idx < 0)
      throw DataError("model file references unknown term '" + term +
                      "' on feature '" + feature + "'");
    out.push_back({f_idx, t_idx});
  }
  return out;
}

json partition_to_json(const FeaturePartition& p) {
  json terms = json::array();
  for (const LinguisticTerm& t : p.terms)
    terms.push_back({{"label", t.label},
                     {"a", t.shape.a},
                     {"b", t.shape.b},
                     {"c", t.shape.c},
                     {"d", t.shape.d}});
  return {{"domain_min", p.domain_min},
          {"domain_max", p.domain_max},
          {"terms", std::move(terms)}};
}

FeaturePartition partition_from_json(const std::string& feature_name,
                                     const json& j) {
  FeaturePartition p;
  p.feature_name = feature_name;
  p.domain_min = j.at("domain_min").get<double>();
  p.domain_max = j.at("domain_max").get<double>();
  for (const json& t : j.at("terms"))
    p.terms.push_back({t.at("label").get<std::string>(),
                       {t.at("a").get<double>(), t.at("b").get<double>(),
                        t.at("c").get<double>(), t.at("d").get<double>()}});
  return p;
}

}  // namespace

std::string model_to_string(const FgrtModel& model) {
  json j;
  j["format_version"] = model.format_version;
  j["config"] = {{"max_rules", model.config.max_rules},
                 {"max_depth", model.config.max_depth},
                 {"min_gain_theta", model.config.min_gain_theta},
                 {"coverage_threshold", model.config.coverage_threshold},
                 {"firing_threshold", model.config.firing_threshold},
                 {"tnorm", to_string(model.config.tnorm)}};
  j["aggregation"] = to_string(model.aggregation);
  j["original_arity"] = model.original_arity;
  j["class_names"] = model.class_names;
  j["default_distribution"] = model.default_distribution;

  json features = json::array();
  for (const FeatureSpec& f : model.features)
    features.push_back({{"name", f.name},
                        {"source_index", f.source_index},
                        {"mean", f.mean},
                        {"stddev", f.stddev},
                        {"partition", partition_to_json(f.partition)}});
  j["features"] = std::move(features);

  json dropped = json::array();
  for (const DroppedFeature& f : model.dropped_features)
    dropped.push_back({{"name", f.name},
                       {"source_index", f.source_index},
                       {"reason", f.reason}});
  j["dropped_features"] = std::move(dropped);

  json rules = json::array();
  for (const FuzzyRule& r : model.rules)
    rules.push_back({{"conditions", conditions_to_json(model, r.conditions)},
                     {"predicted_class", r.predicted_class},
                     {"confidence", r.confidence},
                     {"support", r.support}});
  j["rules"] = std::move(rules);

  json fallbacks = json::array();
  for (const FallbackNode& f : model.fallback_nodes)
    fallbacks.push_back({{"conditions", conditions_to_json(model, f.conditions)},
                         {"distribution", f.distribution}});
  j["fallback_nodes"] = std::move(fallbacks);

  j["metadata"] = {{"dataset", model.metadata.dataset},
                   {"seed", model.metadata.seed}};
  return j.dump(2) + "\n";
}

FgrtModel model_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    FgrtModel model;
    model.format_version = j.at("format_version").get<int>();
    if (model.format_version != kModelFormatVersion)
      throw DataError("unsupported model format_version " +
                      std::to_string(model.format_version));
    const json& cfg = j.at("config");
    model.config.max_rules = cfg.at("max_rules").get<int>();
    model.config.max_depth = cfg.at("max_depth").get<int>();
    model.config.min_gain_theta = cfg.at("min_gain_theta").get<double>();
    model.config.coverage_threshold = cfg.at("coverage_threshold").get<double>();
    model.config.firing_threshold = cfg.at("firing_threshold").get<double>();
    model.config.tnorm = tnorm_from_string(cfg.at("tnorm").get<std::string>());
    model.aggregation =
        aggregation_from_string(j.at("aggregation").get<std::string>());
    model.original_arity = j.at("original_arity").get<int>();
    model.class_names = j.at("class_names").get<std::vector<std::string>>();
    model.default_distribution =
        j.at("default_distribution").get<std::vector<double>>();

    for (const json& f : j.at("features")) {
      FeatureSpec spec;
      spec.name = f.at("name").get<std::string>();
      spec.source_index = f.at("source_index").get<int>();
      spec.mean = f.at("mean").get<double>();
      spec.stddev = f.at("stddev").get<double>();
      spec.partition = partition_from_json(spec.name, f.at("partition"));
      model.features.push_back(std::move(spec));
    }
    for (const json& f : j.at("dropped_features"))
      model.dropped_features.push_back({f.at("name").get<std::string>(),
                                        f.at("source_index").get<int>(),
                                        f.at("reason").get<std::string>()});
    for (const json& r : j.at("rules")) {
      FuzzyRule rule;
      rule.conditions = conditions_from_json(model, r.at("conditions"));
      rule.predicted_class = r.at("predicted_class").get<int>();
      rule.confidence = r.at("confidence").get<std::vector<double>>();
      rule.support = r.at("support").get<double>();
      model.rules.push_back(std::move(rule));
    }
    for (const json& f : j.at("fallback_nodes"))
      model.fallback_nodes.push_back(
          {conditions_from_json(model, f.at("conditions")),
           f.at("distribution").get<std::vector<double>>()});
    model.metadata.dataset = j.at("metadata").at("dataset").get<std::string>();
    model.metadata.seed = j.at("metadata").at("seed").get<std::uint64_t>();

    if (model.rules.size() > static_cast<std::size_t>(model.config.max_rules))
      throw DataError("model file holds more rules than its max_rules");
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const FgrtModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path.string());
  out << model_to_string(model);
}

FgrtModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_string(text);
}

}  // namespace fgrt
