#pragma once

#include <string>
#include <vector>

#include "costru/mst.hpp"

namespace costru {

/// One split of a spanning-tree dataset as stored on disk. `targets`, when present,
/// holds one imitation target per scenario (the coordinated dataset).
struct DatasetFile {
    GridGraph graph;
    Dataset data;
    std::vector<SolutionVector> targets;
};

/// JSON container; doubles are written in shortest round-trip form so reading
/// back reproduces every bit.
std::string dataset_to_json(const DatasetFile& file);
DatasetFile dataset_from_json(const std::string& text);

void write_dataset(const std::string& path, const DatasetFile& file);
DatasetFile read_dataset(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace costru
