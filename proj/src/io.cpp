#include "lexsub/io.hpp"

#include <fstream>
#include <sstream>

namespace lexsub {

namespace {

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw LexsubError(ErrorCode::kIo, "cannot open " + path.string());
  }
  return in;
}

}  // namespace

Json ToJson(const LexSubInstance& instance) {
  Json j;
  j["id"] = instance.id;
  j["tokens"] = instance.tokens;
  j["target_index"] = instance.target_index;
  j["lemma"] = instance.lemma;
  j["pos"] = std::string(PosName(instance.pos));
  if (instance.gold) {
    Json gold = Json::object();
    for (const auto& [w, c] : *instance.gold) gold[w] = c;
    j["gold"] = std::move(gold);
  } else {
    j["gold"] = nullptr;
  }
  if (instance.dependents) j["dependents"] = *instance.dependents;
  return j;
}

LexSubInstance InstanceFromJson(const Json& record) {
  LexSubInstance inst;
  inst.id = record.at("id").is_string()
                ? record.at("id").get<std::string>()
                : record.at("id").dump();
  inst.tokens = record.at("tokens").get<std::vector<std::string>>();
  inst.target_index = record.at("target_index").get<std::size_t>();
  inst.lemma = ToLower(record.at("lemma").get<std::string>());
  inst.pos = ParsePos(record.at("pos").get<std::string>());
  if (auto it = record.find("gold"); it != record.end() && !it->is_null()) {
    GoldWeights gold;
    for (const auto& [w, c] : it->items()) {
      if (w.find(' ') != std::string::npos) continue;
      gold[w] = c.get<int>();
    }
    inst.gold = std::move(gold);
  }
  if (auto it = record.find("dependents"); it != record.end()) {
    inst.dependents = it->get<std::vector<std::size_t>>();
  }
  Validate(inst);
  return inst;
}

std::vector<LexSubInstance> ReadInstancesJsonl(std::istream& in) {
  std::vector<LexSubInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(InstanceFromJson(Json::parse(line)));
    } catch (const std::exception& e) {
      throw LexsubError(ErrorCode::kParseError,
                        "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<LexSubInstance> ReadInstancesJsonl(
    const std::filesystem::path& path) {
  auto in = OpenInput(path);
  return ReadInstancesJsonl(in);
}

void WriteInstancesJsonl(std::ostream& out,
                         const std::vector<LexSubInstance>& instances) {
  for (const auto& inst : instances) out << ToJson(inst).dump() << '\n';
}

Json ToJson(const SubstituteDistribution& dist) {
  Json j = Json::object();
  for (const auto& [w, p] : dist) j[w] = p;
  return j;
}

EmbeddingTable ReadEmbeddingsText(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (lineno == 1 && fields.size() == 2 &&
        fields[0].find_first_not_of("0123456789") == std::string::npos) {
      continue;  // header
    }
    std::vector<float> vec;
    vec.reserve(fields.size() - 1);
    try {
      for (std::size_t i = 1; i < fields.size(); ++i) {
        vec.push_back(std::stof(fields[i]));
      }
    } catch (const std::exception&) {
      throw LexsubError(ErrorCode::kParseError,
                        "embedding line " + std::to_string(lineno));
    }
    table.add(fields[0], std::move(vec));
  }
  return table;
}

EmbeddingTable ReadEmbeddingsText(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  return ReadEmbeddingsText(in);
}

std::unordered_map<std::string, double> ReadCounts(
    const std::filesystem::path& path) {
  auto in = OpenInput(path);
  std::unordered_map<std::string, double> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) {
      throw LexsubError(ErrorCode::kParseError,
                        path.string() + ":" + std::to_string(lineno));
    }
    counts[fields[0]] += std::stod(fields[1]);
  }
  return counts;
}

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Json ReadJsonFile(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw LexsubError(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw LexsubError(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])))
      ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace lexsub
