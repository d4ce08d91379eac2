#pragma once

#include <string>
#include <vector>

#include "dmcore/metric.hpp"

namespace dmcore {

enum class InputFormat { kCoordinates, kMatrix };

// Reads a whole file; transparently inflates gzip (by magic bytes).
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Coordinate tables may carry a header and an `id` column (rows are then
// ordered by id); matrix input is n x n with an optional header row.
MetricSpace load_metric_file(const std::string& path, InputFormat format);
MetricSpace load_metric_csv(const std::string& text, InputFormat format);

std::string metric_to_matrix_csv(const MetricSpace& M);

}  // namespace dmcore
