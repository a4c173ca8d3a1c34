#include "costru/dataset_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace costru {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "costru-dataset";
constexpr int kVersion = 1;

}  // namespace

std::string dataset_to_json(const DatasetFile& file) {
    const auto& data = file.data;
    if (!file.targets.empty() && file.targets.size() != data.size())
        throw InputError("targets must align with scenarios");

    json root;
    root["format"] = kFormat;
    root["version"] = kVersion;
    root["split"] = to_string(data.split);
    root["grid"] = {{"rows", file.graph.rows}, {"cols", file.graph.cols}, {"nodes", file.graph.nb_nodes}};
    json edges = json::array();
    for (const auto& [u, v] : file.graph.edges) edges.push_back({u, v});
    root["grid"]["edges"] = std::move(edges);

    json instances = json::array();
    const auto groups = data.group_by_context();
    for (const auto& group : groups) {
        const Context& ctx = *data.scenarios[group.front()].context;
        json inst;
        inst["id"] = ctx.id;
        inst["nb_features"] = ctx.features.cols;
        inst["features"] = ctx.features.data;
        inst["first_stage_costs"] = ctx.attributes;
        json scenarios = json::array();
        json targets = json::array();
        for (std::size_t idx : group) {
            scenarios.push_back(data.scenarios[idx].noise);
            if (!file.targets.empty()) targets.push_back(file.targets[idx]);
        }
        inst["second_stage_costs"] = std::move(scenarios);
        if (!file.targets.empty()) inst["targets"] = std::move(targets);
        instances.push_back(std::move(inst));
    }
    root["instances"] = std::move(instances);
    return root.dump(1);
}

DatasetFile dataset_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("dataset is not valid JSON: ") + e.what());
    }
    try {
        if (root.at("format") != kFormat || root.at("version") != kVersion)
            throw InputError("unsupported dataset container");
        DatasetFile out;
        const auto& grid = root.at("grid");
        out.graph = make_grid(grid.at("rows").get<std::size_t>(), grid.at("cols").get<std::size_t>());
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (const auto& e : grid.at("edges")) edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
        if (edges != out.graph.edges) throw InputError("edge list does not match the grid ordering");

        out.data.split = split_from_string(root.at("split").get<std::string>());
        const std::size_t m = out.graph.nb_edges();
        for (const auto& inst : root.at("instances")) {
            auto ctx = std::make_shared<Context>();
            ctx->id = inst.at("id").get<int>();
            const auto p = inst.at("nb_features").get<std::size_t>();
            ctx->features = Matrix(m, p);
            ctx->features.data = inst.at("features").get<Vector>();
            ctx->attributes = inst.at("first_stage_costs").get<Vector>();
            if (ctx->features.data.size() != m * p || ctx->attributes.size() != m)
                throw InputError("instance arrays do not match the edge count");
            const auto& scen = inst.at("second_stage_costs");
            const bool has_targets = inst.contains("targets");
            for (std::size_t k = 0; k < scen.size(); ++k) {
                Vector d = scen.at(k).get<Vector>();
                if (d.size() != m) throw InputError("scenario length does not match the edge count");
                out.data.scenarios.push_back({ctx, std::move(d)});
                if (has_targets) out.targets.push_back(inst.at("targets").at(k).get<Vector>());
            }
        }
        if (!out.targets.empty() && out.targets.size() != out.data.size())
            throw InputError("targets present for only some instances");
        out.data.validate();
        return out;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed dataset: ") + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_dataset(const std::string& path, const DatasetFile& file) { write_text_file(path, dataset_to_json(file)); }

DatasetFile read_dataset(const std::string& path) { return dataset_from_json(read_text_file(path)); }

}  // namespace costru
