#include "ares/data/jsonl.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "ares/core/error.hpp"

namespace ares::data {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "ares-dataset";

json vectors(const std::vector<Vec>& rows) {
  json out = json::array();
  for (const Vec& r : rows) out.push_back(r);
  return out;
}

std::vector<Vec> read_vectors(const json& j) {
  std::vector<Vec> out;
  for (const auto& row : j) out.push_back(row.get<Vec>());
  return out;
}

}  // namespace

void write_dataset(const Dataset& dataset, std::ostream& out) {
  json header = {{"format", kFormat},
                 {"version", kDatasetVersion},
                 {"env", dataset.info.env},
                 {"policy", dataset.info.policy},
                 {"seed", dataset.info.seed},
                 {"state_dim", dataset.info.state_dim},
                 {"act_dim", dataset.info.act_dim},
                 {"params", dataset.info.params},
                 {"episodes", dataset.episodes.size()}};
  out << header.dump() << '\n';
  for (const Episode& ep : dataset.episodes) {
    json line = {{"states", vectors(ep.states)}, {"actions", vectors(ep.actions)}};
    if (ep.rewards) line["rewards"] = *ep.rewards;
    line["return"] = ep.episode_return;
    line["meta"] = ep.meta;
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("failed writing dataset");
}

void serialize(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_dataset(dataset, out);
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto parse = [&]() {
    try {
      return json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + " is not valid JSON (last good line " +
                       std::to_string(line_no - 1) + "): " + e.what());
    }
  };
  if (!std::getline(in, line)) throw ParseError("dataset is empty: missing header line");
  ++line_no;
  Dataset d;
  std::size_t expected = 0;
  {
    const json h = parse();
    try {
      if (h.at("format").get<std::string>() != kFormat) throw ParseError("dataset line 1: not an ares dataset");
      const int version = h.at("version").get<int>();
      if (version != kDatasetVersion) {
        throw ParseError("dataset line 1: version " + std::to_string(version) + " is not supported (expected " +
                         std::to_string(kDatasetVersion) + ")");
      }
      d.info.env = h.at("env").get<std::string>();
      d.info.policy = h.at("policy").get<std::string>();
      d.info.seed = h.at("seed").get<std::uint64_t>();
      d.info.state_dim = h.at("state_dim").get<std::size_t>();
      d.info.act_dim = h.at("act_dim").get<std::size_t>();
      d.info.params = h.at("params").get<std::map<std::string, std::string>>();
      expected = h.at("episodes").get<std::size_t>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("dataset line 1: bad header: ") + e.what());
    }
  }
  while (d.episodes.size() < expected) {
    if (!std::getline(in, line)) {
      throw ParseError("dataset truncated: header promises " + std::to_string(expected) + " episodes, last good line is " +
                       std::to_string(line_no));
    }
    ++line_no;
    const json j = parse();
    Episode ep;
    try {
      ep.states = read_vectors(j.at("states"));
      ep.actions = read_vectors(j.at("actions"));
      if (j.contains("rewards")) ep.rewards = j.at("rewards").get<std::vector<double>>();
      ep.episode_return = j.at("return").get<double>();
      if (j.contains("meta")) ep.meta = j.at("meta").get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      ep.validate();
    } catch (const Error& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    d.episodes.push_back(std::move(ep));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": more episodes than the header declares");
    }
  }
  try {
    d.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("dataset: ") + e.what());
  }
  return d;
}

Dataset deserialize(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return read_dataset(in);
}

}  // namespace ares::data
