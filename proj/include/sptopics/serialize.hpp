#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sptopics/matrix.hpp"
#include "sptopics/predict.hpp"
#include "sptopics/spca.hpp"
#include "sptopics/topics.hpp"

namespace sptopics {

// One component per line: index, 0-based support, loading values on the
// support, explained variance, iterations used.
void write_components_jsonl(const std::string& path,
                            std::span<const SparseComponent> comps);

// Full interference table for external plotting; one row per document.
void write_interference_csv(const std::string& path,
                            const InterferenceTable& table);

nlohmann::json topics_to_json(const TopicAssignment& assignment,
                              const InterferenceTable& table);
void write_topics_json(const std::string& path, const TopicAssignment& assignment,
                       const InterferenceTable& table,
                       const nlohmann::json& config);

nlohmann::json report_to_json(const PredictionReport& report);
void write_report_json(const std::string& path,
                       const std::map<std::string, PredictionReport>& reports,
                       const nlohmann::json& config);

// Accuracy table: one row per category, one column per method, percentages
// with two decimals, closed by a total row.
void write_report_csv(const std::string& path,
                      std::span<const std::string> method_order,
                      const std::map<std::string, PredictionReport>& reports);

// Split file: {"learn": [...], "match": [...], "test": [...]}; labels come
// from a separate one-identifier-per-line file.
LabeledSplit load_split(const std::string& split_path,
                        const std::string& labels_path, std::size_t n_docs);

void write_json(const std::string& path, const nlohmann::json& value);

}  // namespace sptopics
