#include "sptopics/serialize.hpp"

#include <cstdio>
#include <fstream>

#include "sptopics/corpus.hpp"
#include "sptopics/error.hpp"

namespace sptopics {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

}  // namespace

void write_components_jsonl(const std::string& path,
                            std::span<const SparseComponent> comps) {
  std::ofstream out = open_out(path);
  for (std::size_t l = 0; l < comps.size(); ++l) {
    const SparseComponent& c = comps[l];
    nlohmann::json record;
    record["component"] = l;
    record["support"] = c.support;
    std::vector<double> values;
    values.reserve(c.support.size());
    for (Index j : c.support) values.push_back(c.loading[j]);
    record["values"] = values;
    record["explained_variance"] = c.explained_variance;
    record["iterations"] = c.iterations_used;
    record["restart"] = c.restart_index;
    out << record.dump() << '\n';
  }
  close_out(out, path);
}

void write_interference_csv(const std::string& path,
                            const InterferenceTable& table) {
  std::ofstream out = open_out(path);
  out << "doc";
  for (std::size_t l = 0; l < table.n_components(); ++l) out << ",topic" << l;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.n_docs(); ++i) {
    out << i;
    for (std::size_t l = 0; l < table.n_components(); ++l) {
      std::snprintf(buf, sizeof(buf), "%.17g", table.at(i, l));
      out << ',' << buf;
    }
    out << '\n';
  }
  close_out(out, path);
}

nlohmann::json topics_to_json(const TopicAssignment& assignment,
                              const InterferenceTable& table) {
  nlohmann::json topics = nlohmann::json::array();
  for (const TopicInfo& topic : assignment.topics) {
    nlohmann::json entry;
    entry["component"] = topic.component;
    entry["degenerate"] = topic.degenerate;
    if (!topic.degenerate) {
      entry["threshold"] = topic.threshold;
      entry["gap"] = topic.gap;
    }
    entry["members"] = topic.members;
    std::vector<double> values;
    values.reserve(topic.members.size());
    for (Index doc : topic.members)
      values.push_back(table.at(doc, topic.component));
    entry["member_interference"] = values;
    topics.push_back(std::move(entry));
  }
  return topics;
}

void write_topics_json(const std::string& path, const TopicAssignment& assignment,
                       const InterferenceTable& table,
                       const nlohmann::json& config) {
  nlohmann::json doc;
  doc["config"] = config;
  doc["topics"] = topics_to_json(assignment, table);
  write_json(path, doc);
}

nlohmann::json report_to_json(const PredictionReport& report) {
  nlohmann::json j;
  j["total"] = report.total;
  j["per_category"] = report.per_category;
  nlohmann::json assignments = nlohmann::json::array();
  for (const auto& [test_doc, match_doc] : report.assignments)
    assignments.push_back({{"test", test_doc}, {"match", match_doc}});
  j["assignments"] = std::move(assignments);
  j["zero_interference"] = report.zero_interference;
  return j;
}

void write_report_json(const std::string& path,
                       const std::map<std::string, PredictionReport>& reports,
                       const nlohmann::json& config) {
  nlohmann::json doc;
  doc["config"] = config;
  for (const auto& [method, report] : reports)
    doc["methods"][method] = report_to_json(report);
  write_json(path, doc);
}

void write_report_csv(const std::string& path,
                      std::span<const std::string> method_order,
                      const std::map<std::string, PredictionReport>& reports) {
  for (const std::string& method : method_order)
    if (!reports.count(method))
      fail(ErrorKind::Config, "no report for method '" + method + "'");

  // Row set: every category seen by any method, in lexicographic order.
  std::map<std::string, bool> categories;
  for (const auto& [method, report] : reports)
    for (const auto& [cat, acc] : report.per_category) categories[cat] = true;

  std::ofstream out = open_out(path);
  out << "category";
  for (const std::string& method : method_order) out << ',' << csv_field(method);
  out << '\n';
  for (const auto& [cat, seen] : categories) {
    out << csv_field(cat);
    for (const std::string& method : method_order) {
      const PredictionReport& report = reports.at(method);
      auto it = report.per_category.find(cat);
      out << ',' << (it == report.per_category.end() ? std::string("-")
                                                     : percent(it->second));
    }
    out << '\n';
  }
  out << "total";
  for (const std::string& method : method_order)
    out << ',' << percent(reports.at(method).total);
  out << '\n';
  close_out(out, path);
}

LabeledSplit load_split(const std::string& split_path,
                        const std::string& labels_path, std::size_t n_docs) {
  std::ifstream in(split_path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + split_path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, "'" + split_path + "': " + e.what());
  }

  LabeledSplit split;
  auto read_set = [&](const char* key, std::vector<Index>& target) {
    if (!doc.contains(key))
      fail(ErrorKind::Format,
           "'" + split_path + "' is missing the '" + key + "' list");
    const nlohmann::json& list = doc.at(key);
    if (!list.is_array())
      fail(ErrorKind::Format,
           "'" + split_path + "': '" + key + "' must be a list of indices");
    for (const auto& v : list) {
      if (!v.is_number_unsigned())
        fail(ErrorKind::Format, "'" + split_path + "': '" + key +
                                    "' holds a non-index value");
      target.push_back(v.get<Index>());
    }
  };
  read_set("learn", split.learn);
  read_set("match", split.match);
  read_set("test", split.test);
  split.labels = load_labels(labels_path, n_docs);
  split.validate(n_docs);
  return split;
}

void write_json(const std::string& path, const nlohmann::json& value) {
  std::ofstream out = open_out(path);
  out << value.dump(2) << '\n';
  close_out(out, path);
}

}  // namespace sptopics
