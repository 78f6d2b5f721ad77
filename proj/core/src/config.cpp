#include "spatcode/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace spatcode {

namespace {

using nlohmann::json;

// Pulls `key` out of `obj` into `target` when present, enforcing the JSON
// type matches what the default value suggests.
template <typename T>
void take(const json& obj, const char* key, T& target) {
    if (!obj.contains(key)) return;
    try {
        target = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

void reject_unknown(const json& obj, const char* section, std::set<std::string> known) {
    for (const auto& item : obj.items()) {
        if (known.count(item.key()) == 0) {
            throw ConfigError(std::string("unknown key '") + item.key() + "' in section '" +
                              section + "'");
        }
    }
}

MergeRule merge_rule_from(const std::string& name) {
    if (name == "weighted_sum") return MergeRule::kWeightedSum;
    if (name == "reciprocal_rank") return MergeRule::kReciprocalRank;
    throw ConfigError("unknown merge rule '" + name + "' (expected weighted_sum | reciprocal_rank)");
}

std::string merge_rule_name(MergeRule rule) {
    return rule == MergeRule::kWeightedSum ? "weighted_sum" : "reciprocal_rank";
}

ContentDistribution distribution_from(const std::string& name) {
    if (name == "gaussian_clusters") return ContentDistribution::kGaussianClusters;
    if (name == "uniform_sphere") return ContentDistribution::kUniformSphere;
    throw ConfigError("unknown distribution '" + name +
                      "' (expected gaussian_clusters | uniform_sphere)");
}

std::string distribution_name(ContentDistribution distribution) {
    return distribution == ContentDistribution::kGaussianClusters ? "gaussian_clusters"
                                                                  : "uniform_sphere";
}

void validate(const ExperimentConfig& config) {
    if (config.method != "spatcode" && config.method != "filtered" && config.method != "hybrid") {
        throw ConfigError("unknown method '" + config.method +
                          "' (expected spatcode | filtered | hybrid)");
    }
    if (config.content_dims.empty()) {
        throw ConfigError("content_dims must not be empty");
    }
    for (int d : config.content_dims) {
        if (d < 1) throw ConfigError("content dimensions must be positive");
    }
    if (!(config.unit_seconds > 0.0)) throw ConfigError("window.unit_seconds must be positive");
    if (config.bucket_count < 1) throw ConfigError("window.bucket_count must be positive");
    if (config.record_count == 0) throw ConfigError("data.record_count must be positive");
    if (config.stream_months == 0) throw ConfigError("data.stream_months must be positive");
    if (config.query_count == 0) throw ConfigError("queries.count must be positive");
    if (config.k < 1) throw ConfigError("queries.k must be positive");
    for (int k : config.recall_ks) {
        if (k < 1) throw ConfigError("queries.recall_ks entries must be positive");
    }
    for (int ef : config.ef_sweep) {
        if (ef < 1) throw ConfigError("sweeps.ef entries must be positive");
    }
    for (double f : config.alpha_factors) {
        if (!(f > 0.0)) throw ConfigError("sweeps.alpha_factors entries must be positive");
    }
    if (!(config.alpha_span_seconds > 0.0)) {
        throw ConfigError("sweeps.alpha_span_seconds must be positive");
    }
    if (config.alpha_timestamps == 0) {
        throw ConfigError("sweeps.alpha_timestamps must be positive");
    }
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    reject_unknown(root, "<root>",
                   {"experiment_id", "method", "out_dir", "seed", "schema", "window", "ann",
                    "data", "queries", "sweeps", "baselines", "verify_window_equivalence"});

    ExperimentConfig config;
    take(root, "experiment_id", config.experiment_id);
    take(root, "method", config.method);
    take(root, "out_dir", config.out_dir);
    take(root, "seed", config.seed);
    take(root, "verify_window_equivalence", config.verify_window_equivalence);

    if (root.contains("schema")) {
        const json& schema = root.at("schema");
        reject_unknown(schema, "schema", {"content_dims"});
        take(schema, "content_dims", config.content_dims);
    }
    if (root.contains("window")) {
        const json& window = root.at("window");
        reject_unknown(window, "window", {"unit_seconds", "bucket_count", "epoch"});
        take(window, "unit_seconds", config.unit_seconds);
        take(window, "bucket_count", config.bucket_count);
        take(window, "epoch", config.epoch);
    }
    if (root.contains("ann")) {
        const json& ann = root.at("ann");
        reject_unknown(ann, "ann",
                       {"max_neighbors", "ef_construction", "default_ef_search",
                        "fragmentation_threshold", "seed"});
        take(ann, "max_neighbors", config.ann.max_neighbors);
        take(ann, "ef_construction", config.ann.ef_construction);
        take(ann, "default_ef_search", config.ann.default_ef_search);
        take(ann, "fragmentation_threshold", config.ann.fragmentation_threshold);
        take(ann, "seed", config.ann.seed);
    }
    if (root.contains("data")) {
        const json& data = root.at("data");
        reject_unknown(data, "data",
                       {"record_count", "stream_months", "distribution", "cluster_count",
                        "cluster_spread", "geo_box"});
        take(data, "record_count", config.record_count);
        take(data, "stream_months", config.stream_months);
        if (data.contains("distribution")) {
            config.distribution = distribution_from(data.at("distribution").get<std::string>());
        }
        take(data, "cluster_count", config.cluster_count);
        take(data, "cluster_spread", config.cluster_spread);
        if (data.contains("geo_box")) {
            const json& box = data.at("geo_box");
            reject_unknown(box, "data.geo_box", {"lat_lo", "lat_hi", "lon_lo", "lon_hi"});
            take(box, "lat_lo", config.geo_box.lat_lo);
            take(box, "lat_hi", config.geo_box.lat_hi);
            take(box, "lon_lo", config.geo_box.lon_lo);
            take(box, "lon_hi", config.geo_box.lon_hi);
        }
    }
    if (root.contains("queries")) {
        const json& queries = root.at("queries");
        reject_unknown(queries, "queries",
                       {"count", "k", "recall_ks", "ef_search", "cue_noise", "weight_choices"});
        take(queries, "count", config.query_count);
        take(queries, "k", config.k);
        take(queries, "recall_ks", config.recall_ks);
        take(queries, "ef_search", config.ef_search);
        take(queries, "cue_noise", config.cue_noise);
        take(queries, "weight_choices", config.weight_choices);
    }
    if (root.contains("sweeps")) {
        const json& sweeps = root.at("sweeps");
        reject_unknown(sweeps, "sweeps",
                       {"ef", "alpha_factors", "alpha_span_seconds", "alpha_epoch",
                        "alpha_timestamps"});
        take(sweeps, "ef", config.ef_sweep);
        take(sweeps, "alpha_factors", config.alpha_factors);
        take(sweeps, "alpha_span_seconds", config.alpha_span_seconds);
        take(sweeps, "alpha_epoch", config.alpha_epoch);
        take(sweeps, "alpha_timestamps", config.alpha_timestamps);
    }
    if (root.contains("baselines")) {
        const json& baselines = root.at("baselines");
        reject_unknown(baselines, "baselines",
                       {"filter_time_halfwidth", "filter_geo_halfwidth", "hybrid"});
        take(baselines, "filter_time_halfwidth", config.filter_time_halfwidth);
        take(baselines, "filter_geo_halfwidth", config.filter_geo_halfwidth);
        if (baselines.contains("hybrid")) {
            const json& hybrid = baselines.at("hybrid");
            reject_unknown(hybrid, "baselines.hybrid",
                           {"per_modality_k", "merge_rule", "rrf_constant"});
            take(hybrid, "per_modality_k", config.hybrid.per_modality_k);
            if (hybrid.contains("merge_rule")) {
                config.hybrid.merge_rule =
                    merge_rule_from(hybrid.at("merge_rule").get<std::string>());
            }
            take(hybrid, "rrf_constant", config.hybrid.rrf_constant);
        }
    }

    validate(config);
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_json(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
    json root;
    root["experiment_id"] = config.experiment_id;
    root["method"] = config.method;
    root["out_dir"] = config.out_dir;
    root["seed"] = config.seed;
    root["verify_window_equivalence"] = config.verify_window_equivalence;
    root["schema"]["content_dims"] = config.content_dims;
    root["window"] = {{"unit_seconds", config.unit_seconds},
                      {"bucket_count", config.bucket_count},
                      {"epoch", config.epoch}};
    root["ann"] = {{"max_neighbors", config.ann.max_neighbors},
                   {"ef_construction", config.ann.ef_construction},
                   {"default_ef_search", config.ann.default_ef_search},
                   {"fragmentation_threshold", config.ann.fragmentation_threshold},
                   {"seed", config.ann.seed}};
    root["data"] = {{"record_count", config.record_count},
                    {"stream_months", config.stream_months},
                    {"distribution", distribution_name(config.distribution)},
                    {"cluster_count", config.cluster_count},
                    {"cluster_spread", config.cluster_spread},
                    {"geo_box",
                     {{"lat_lo", config.geo_box.lat_lo},
                      {"lat_hi", config.geo_box.lat_hi},
                      {"lon_lo", config.geo_box.lon_lo},
                      {"lon_hi", config.geo_box.lon_hi}}}};
    root["queries"] = {{"count", config.query_count},
                       {"k", config.k},
                       {"recall_ks", config.recall_ks},
                       {"ef_search", config.ef_search},
                       {"cue_noise", config.cue_noise},
                       {"weight_choices", config.weight_choices}};
    root["sweeps"] = {{"ef", config.ef_sweep},
                      {"alpha_factors", config.alpha_factors},
                      {"alpha_span_seconds", config.alpha_span_seconds},
                      {"alpha_epoch", config.alpha_epoch},
                      {"alpha_timestamps", config.alpha_timestamps}};
    root["baselines"] = {{"filter_time_halfwidth", config.filter_time_halfwidth},
                         {"filter_geo_halfwidth", config.filter_geo_halfwidth},
                         {"hybrid",
                          {{"per_modality_k", config.hybrid.per_modality_k},
                           {"merge_rule", merge_rule_name(config.hybrid.merge_rule)},
                           {"rrf_constant", config.hybrid.rrf_constant}}}};
    return root.dump(2) + "\n";
}

}  // namespace spatcode
