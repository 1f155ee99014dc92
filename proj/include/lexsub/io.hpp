#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lexsub/core.hpp"

namespace lexsub {

using Json = nlohmann::json;

// Canonical instance record: {id, tokens, target_index, lemma, pos, gold}.
Json ToJson(const LexSubInstance& instance);
LexSubInstance InstanceFromJson(const Json& record);

// One JSON record per line; blank lines skipped. ParseError carries the line.
std::vector<LexSubInstance> ReadInstancesJsonl(std::istream& in);
std::vector<LexSubInstance> ReadInstancesJsonl(const std::filesystem::path& path);
void WriteInstancesJsonl(std::ostream& out,
                         const std::vector<LexSubInstance>& instances);

Json ToJson(const SubstituteDistribution& dist);

// word2vec text format: optional "<count> <dim>" header, then
// "word x1 ... xd" per line.
EmbeddingTable ReadEmbeddingsText(const std::filesystem::path& path);
EmbeddingTable ReadEmbeddingsText(std::istream& in);

// "word count" per line.
std::unordered_map<std::string, double> ReadCounts(
    const std::filesystem::path& path);

// One entry per line, order preserved.
std::vector<std::string> ReadLines(const std::filesystem::path& path);

Json ReadJsonFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

std::vector<std::string> SplitWhitespace(std::string_view text);

}  // namespace lexsub
