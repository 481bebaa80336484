#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "praisekit/corpus.hpp"
#include "praisekit/error.hpp"

namespace praisekit {

// Dataset file format (UTF-8 JSON, labels lowercase):
//   {"scheme": ["effort", "outcome"],
//    "records": [{"id": "...", "text": "...",
//                 "spans": [{"label": "outcome", "start": 23, "end": 32}]}]}

inline nlohmann::ordered_json dataset_to_json(const Dataset& d) {
  nlohmann::ordered_json j;
  j["scheme"] = nlohmann::ordered_json::array();
  for (PraiseLabel l : d.scheme) j["scheme"].push_back(label_name(l));
  j["records"] = nlohmann::ordered_json::array();
  for (const LabeledResponse& r : d.records) {
    nlohmann::ordered_json jr;
    jr["id"] = r.id;
    jr["text"] = r.text;
    jr["spans"] = nlohmann::ordered_json::array();
    for (const PraiseSpan& s : r.spans) {
      jr["spans"].push_back({{"label", label_name(s.label)},
                             {"start", s.start},
                             {"end", s.end}});
    }
    j["records"].push_back(std::move(jr));
  }
  return j;
}

inline Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset d;
  if (!j.is_object() || !j.contains("scheme") || !j.contains("records")) {
    throw ValidationError("dataset JSON must have 'scheme' and 'records'");
  }
  if (!j["scheme"].is_array() || j["scheme"].empty()) {
    throw ValidationError("'scheme' must be a non-empty array of labels");
  }
  for (const auto& s : j["scheme"]) {
    if (!s.is_string()) throw ValidationError("'scheme' entries must be strings");
    const auto l = parse_label(s.get<std::string>());
    if (!l) {
      throw ValidationError("unknown label '" + s.get<std::string>() +
                            "' in scheme");
    }
    d.scheme.push_back(*l);
  }
  std::sort(d.scheme.begin(), d.scheme.end());
  d.scheme.erase(std::unique(d.scheme.begin(), d.scheme.end()),
                 d.scheme.end());

  if (!j["records"].is_array()) {
    throw ValidationError("'records' must be an array");
  }
  for (const auto& jr : j["records"]) {
    LabeledResponse r;
    if (!jr.is_object() || !jr.contains("id") || !jr.contains("text")) {
      throw ValidationError("record missing 'id' or 'text'");
    }
    r.id = jr["id"].get<std::string>();
    r.text = jr["text"].get<std::string>();
    if (jr.contains("spans")) {
      for (const auto& js : jr["spans"]) {
        if (!js.contains("label") || !js.contains("start") ||
            !js.contains("end")) {
          throw ValidationError("response '" + r.id +
                                "': span needs label/start/end");
        }
        const auto l = parse_label(js["label"].get<std::string>());
        if (!l) {
          throw ValidationError("response '" + r.id + "': unknown label '" +
                                js["label"].get<std::string>() + "'");
        }
        if (!js["start"].is_number_unsigned() ||
            !js["end"].is_number_unsigned()) {
          throw ValidationError("response '" + r.id +
                                "': span offsets must be non-negative");
        }
        r.spans.push_back({*l, js["start"].get<std::size_t>(),
                           js["end"].get<std::size_t>()});
      }
    }
    d.records.push_back(std::move(r));
  }
  validate_dataset(d);
  return d;
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("dataset '" + path + "' is not valid JSON: " +
                          e.what());
  }
  return dataset_from_json(j);
}

/// Serializes with a stable key order and 2-space indentation so identical
/// datasets produce identical bytes.
inline std::string dataset_to_string(const Dataset& d) {
  return dataset_to_json(d).dump(2) + "\n";
}

inline void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset file '" + path + "'");
  out << dataset_to_string(d);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path,
                            const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file '" + path + "'");
  out << contents;
}

}  // namespace praisekit
